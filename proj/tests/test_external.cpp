#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <string>

#include "maskcert/errors.hpp"
#include "maskcert/external_classifier.hpp"
#include "maskcert/smoothing.hpp"

using namespace maskcert;

namespace {

std::string stub_path;  // set from argv in main

MaskedText masked_tokens(std::initializer_list<const char*> tokens) {
    Text text;
    for (const char* token : tokens) text.tokens.emplace_back(token);
    return mask(text, RetentionSet::full(text.length()));
}

}  // namespace

TEST_CASE("fixed-score stub round trip") {
    ExternalClassifier classifier({stub_path, "fixed", "0.2", "0.8"});
    CHECK(classifier.class_count() == 2);
    const auto scores = classifier.classify(masked_tokens({"a", "b"}));
    CHECK(scores.scores == std::vector<double>{0.2, 0.8});
    CHECK(scores.argmax() == 1);
    // several requests on one process
    for (int i = 0; i < 5; ++i)
        CHECK(classifier.classify(masked_tokens({"x"})).argmax() == 1);
}

TEST_CASE("keyword stub sees sentinel-masked tokens") {
    ExternalClassifier classifier({stub_path, "keyword", "great"});
    CHECK(classifier.classify(masked_tokens({"a", "great"})).argmax() == 1);
    CHECK(classifier.classify(masked_tokens({"a", "b"})).argmax() == 0);

    // masked positions carry the sentinel string on the wire
    Text text;
    text.tokens = {"great", "film"};
    const auto masked = mask(text, RetentionSet::create({1}, 2));
    CHECK(classifier.classify(masked).argmax() == 0);
}

TEST_CASE("wrong reply id raises a protocol error") {
    ExternalClassifier classifier({stub_path, "wrongid"});
    CHECK_THROWS_AS(classifier.classify(masked_tokens({"a"})), ProtocolError);
}

TEST_CASE("a child dying mid-request raises a transport error") {
    ExternalClassifier classifier({stub_path, "die"});
    CHECK_THROWS_AS(classifier.classify(masked_tokens({"a"})), TransportError);
}

TEST_CASE("garbage replies raise a protocol error") {
    ExternalClassifier classifier({stub_path, "garbage"});
    CHECK_THROWS_AS(classifier.classify(masked_tokens({"a"})), ProtocolError);
}

TEST_CASE("non-finite scores raise a protocol error") {
    ExternalClassifier classifier({stub_path, "nonfinite"});
    CHECK_THROWS_AS(classifier.classify(masked_tokens({"a"})), ProtocolError);
}

TEST_CASE("a silent child times out during the handshake") {
    CHECK_THROWS_AS(ExternalClassifier({stub_path, "silent"}, 300), TransportError);
}

TEST_CASE("smoothing propagates child failures with the sample index") {
    ExternalClassifier classifier({stub_path, "die"});
    Text text;
    text.tokens = {"a", "b", "c"};
    SmoothingConfig cfg;
    cfg.rho = 0.5;
    cfg.n = 8;
    cfg.n_prime = 8;
    try {
        classifier_g(text, classifier, cfg, 8, 0);
        FAIL("expected a transport error");
    } catch (const TransportError& error) {
        CHECK(std::string(error.what()).find("sample") != std::string::npos);
    }
}

int run_doctest(int argc, char** argv) {
    doctest::Context context;
    context.applyCommandLine(argc, argv);
    return context.run();
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_external <stub_classifier_path>\n");
        return 2;
    }
    stub_path = argv[argc - 1];
    return run_doctest(argc - 1, argv);
}
