#include <doctest.h>

#include "synthetic.hpp"
#include "test_support.hpp"

#include <vitd/error.hpp>
#include <vitd/prediction_store.hpp>

#include <sstream>

using namespace vitd;

namespace {

DatasetSplit small_split(std::size_t n) {
    std::vector<Example> ex;
    for (std::size_t i = 0; i < n; ++i) ex.push_back({"e" + std::to_string(i), "t", LabelClass::NonViolence});
    return DatasetSplit("dev", ex);
}

} // namespace

TEST_CASE("argmax and make_record") {
    CHECK(argmax_label({0, 0, 0}) == LabelClass::NonViolence);
    CHECK(argmax_label({0, 1, 1}) == LabelClass::PassiveViolence);
    CHECK(argmax_label({-1, -1, 0}) == LabelClass::DirectViolence);

    const auto r = make_record("x", "m", Logits{0.1, 2.0, -1.0}, std::nullopt);
    CHECK(r.label == LabelClass::PassiveViolence);
    CHECK_THROWS_AS(make_record("x", "m", Logits{0.1, 2.0, -1.0}, LabelClass::NonViolence), ConsistencyError);
    CHECK_THROWS_AS(make_record("x", "m", Logits{0.1, std::nan(""), -1.0}, std::nullopt), NumericError);
    CHECK_THROWS_AS(make_record("x", "m", std::nullopt, std::nullopt), ArgumentError);
    CHECK_THROWS_AS(make_record("", "m", std::nullopt, LabelClass::NonViolence), ArgumentError);
    CHECK(make_record("x", "m", std::nullopt, LabelClass::DirectViolence).label == LabelClass::DirectViolence);
}

TEST_CASE("parse_predictions") {
    SUBCASE("label derived from logits") {
        const auto recs = parse_predictions("{\"example_id\": \"e0\", \"model_id\": \"m\", \"logits\": [0.1, 2.0, -1.0]}\n");
        REQUIRE(recs.size() == 1);
        CHECK(recs[0].label == LabelClass::PassiveViolence);
    }
    SUBCASE("inconsistent label is a consistency error naming the line") {
        try {
            parse_predictions("\n{\"example_id\":\"e0\",\"model_id\":\"m\",\"logits\":[0.1,2.0,-1.0],\"label\":0}\n");
            FAIL("expected ConsistencyError");
        } catch (const ConsistencyError& e) {
            CHECK(std::string(e.what()).starts_with("line 2:"));
        }
    }
    SUBCASE("malformed lines") {
        CHECK_THROWS_AS(parse_predictions("{\"example_id\":\"e0\",\"model_id\":\"m\",\"label\":3}"), ParseError);
        CHECK_THROWS_AS(parse_predictions("{\"example_id\":\"e0\",\"model_id\":\"m\",\"label\":\"1\"}"), ParseError);
        CHECK_THROWS_AS(parse_predictions("{\"example_id\":\"e0\",\"model_id\":\"m\"}"), ParseError);
        CHECK_THROWS_AS(parse_predictions("{\"example_id\":\"e0\",\"model_id\":\"m\",\"logits\":[1,2]}"), ParseError);
        CHECK_THROWS_AS(parse_predictions("{\"example_id\":7,\"model_id\":\"m\",\"label\":1}"), ParseError);
        CHECK_THROWS_AS(parse_predictions("[1,2,3]"), ParseError);
        try {
            parse_predictions("{\"example_id\":\"e0\",\"model_id\":\"m\",\"label\":1}\nnot json\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row() == 2);
        }
    }
    SUBCASE("CRLF line endings and label-only records") {
        const auto recs = parse_predictions("{\"example_id\":\"a\",\"model_id\":\"m\",\"label\":2}\r\n");
        REQUIRE(recs.size() == 1);
        CHECK_FALSE(recs[0].logits.has_value());
        CHECK(recs[0].label == LabelClass::DirectViolence);
    }
}

TEST_CASE("wire format writer") {
    const auto r = make_record("ex-1", "bangla", Logits{0.5, -1.25, 3.0}, std::nullopt);
    CHECK(record_to_json_line(r) ==
          "{\"example_id\":\"ex-1\",\"model_id\":\"bangla\",\"logits\":[0.5,-1.25,3.0],\"label\":2}");
    const auto l = make_record("ex-2", "m", std::nullopt, LabelClass::PassiveViolence);
    CHECK(record_to_json_line(l) == "{\"example_id\":\"ex-2\",\"model_id\":\"m\",\"label\":1}");
    std::ostringstream out;
    const std::vector<PredictionRecord> both = {r, l};
    write_predictions(out, both);
    const std::string text = out.str();
    CHECK(text.find('\r') == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("validation errors") {
    const auto split = small_split(3);
    SUBCASE("unknown ids are all listed") {
        std::vector<PredictionRecord> recs = {make_record("e0", "m", std::nullopt, LabelClass::NonViolence),
                                              make_record("zz", "m", std::nullopt, LabelClass::NonViolence),
                                              make_record("yy", "m", std::nullopt, LabelClass::NonViolence),
                                              make_record("zz", "n", std::nullopt, LabelClass::NonViolence)};
        try {
            validate_predictions(recs, split);
            FAIL("expected ReferentialError");
        } catch (const ReferentialError& e) {
            CHECK(e.offenders() == std::vector<std::string>{"zz", "yy"});
        }
    }
    SUBCASE("duplicate cell") {
        std::vector<PredictionRecord> recs = {make_record("e0", "m", std::nullopt, LabelClass::NonViolence),
                                              make_record("e0", "m", std::nullopt, LabelClass::PassiveViolence)};
        CHECK_THROWS_AS(validate_predictions(recs, split), DuplicationError);
        recs[1].model_id = "n";
        CHECK_NOTHROW(validate_predictions(recs, split));
    }
}

TEST_CASE("assemble_matrix") {
    const auto split = small_split(3);
    const std::vector<std::string> models = {"b", "a"};
    std::vector<PredictionRecord> recs;
    for (int e = 2; e >= 0; --e)
        for (const auto& m : {"a", "b"})
            recs.push_back(make_record("e" + std::to_string(e), m, std::nullopt, *label_from_code((e + (m[0] == 'a')) % 3)));

    const auto matrix = assemble_matrix(recs, models, split);
    CHECK(matrix.num_models() == 2);
    CHECK(matrix.num_examples() == 3);
    CHECK(matrix.model_ids() == models);
    CHECK(matrix.example_ids() == split.ids());
    for (int e = 0; e < 3; ++e) {
        CHECK(label_code(matrix.label(0, e)) == e % 3);
        CHECK(label_code(matrix.label(1, e)) == (e + 1) % 3);
    }
    CHECK_FALSE(matrix.has_logits());
    CHECK(matrix.column(1) == test::labels({1, 2}));
    CHECK(matrix.model_index("a") == 1);

    SUBCASE("missing cell names the first gap") {
        auto missing = recs;
        std::erase_if(missing, [](const PredictionRecord& r) {
            return (r.model_id == "b" && r.example_id == "e2") || (r.model_id == "a" && r.example_id == "e0");
        });
        try {
            assemble_matrix(missing, models, split);
            FAIL("expected CompletenessError");
        } catch (const CompletenessError& e) {
            CHECK(e.model_id() == "b");
            CHECK(e.example_id() == "e2");
        }
    }
    SUBCASE("1x1") {
        const auto one = small_split(1);
        std::vector<PredictionRecord> r = {make_record("e0", "m", Logits{0, 0, 1}, std::nullopt)};
        const auto m = assemble_matrix(r, std::vector<std::string>{"m"}, one);
        CHECK(m.num_models() == 1);
        CHECK(m.num_examples() == 1);
        CHECK(m.has_logits());
        CHECK(m.label(0, 0) == LabelClass::DirectViolence);
    }
    SUBCASE("records of unlisted models are ignored") {
        auto extra = recs;
        extra.push_back(make_record("e0", "zzz", std::nullopt, LabelClass::NonViolence));
        CHECK(assemble_matrix(extra, models, split) == matrix);
    }
    SUBCASE("5 models x 2016 examples") {
        const auto big = small_split(2016);
        std::vector<PredictionRecord> all;
        std::vector<std::string> ids;
        for (int m = 0; m < 5; ++m) {
            ids.push_back("model" + std::to_string(m));
            for (const auto& ex : big.examples()) all.push_back(make_record(ex.id, ids.back(), std::nullopt, LabelClass::NonViolence));
        }
        const auto m = assemble_matrix(all, ids, big);
        CHECK(m.num_models() == 5);
        CHECK(m.num_examples() == 2016);
    }
}

TEST_CASE("export -> import round trip is lossless") {
    const auto split = fixture::make_corpus("test", {200, {0.5, 0.35, 0.15}, true, 4});
    std::vector<PredictionRecord> all;
    std::vector<std::string> models;
    for (int m = 0; m < 5; ++m) {
        models.push_back("model-" + std::to_string(m));
        auto recs = fixture::noisy_predictions(split, models.back(), 0.7, 100 + m);
        all.insert(all.end(), recs.begin(), recs.end());
    }
    const auto matrix = assemble_matrix(all, models, split);
    REQUIRE(matrix.has_logits());

    test::TempDir dir("store");
    write_predictions(dir / "p.jsonl", export_matrix(matrix));
    const auto back = import_predictions(dir / "p.jsonl", split);
    CHECK(back == export_matrix(matrix));
    CHECK(assemble_matrix(back, models, split) == matrix);

    // Round trip through text twice gives byte-identical files.
    write_predictions(dir / "q.jsonl", back);
    CHECK(test::read_text(dir / "p.jsonl") == test::read_text(dir / "q.jsonl"));
}
