#include "synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Writes a synthetic three-class workspace with a ready-to-run experiment.toml."};
    app.name("vitd-fixture");

    std::string dir;
    vitd::fixture::WorkspaceOptions opts;
    std::vector<double> accuracies;
    app.add_option("dir", dir, "Output directory")->required();
    app.add_option("--seed", opts.seed, "Generator seed");
    app.add_option("--train", opts.train_size, "Train examples");
    app.add_option("--dev", opts.dev_size, "Dev examples");
    app.add_option("--test", opts.test_size, "Test examples");
    app.add_option("--references", opts.reference_models, "Number of reference models");
    app.add_option("--external-accuracy", accuracies, "Accuracy of each simulated external model")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--dims-log2", opts.dims_log2, "Featurizer dimension exponent");
    app.add_flag("!--unlabeled-test", opts.test_labeled, "Write the test split without labels");
    CLI11_PARSE(app, argc, argv);

    if (app.count("--external-accuracy") > 0) {
        opts.externals.clear();
        for (std::size_t i = 0; i < accuracies.size(); ++i) {
            opts.externals.push_back({"ext-" + std::string(1, static_cast<char>('a' + i)), accuracies[i]});
        }
    }
    try {
        std::cout << vitd::fixture::write_workspace(dir, opts).string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "vitd-fixture: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
