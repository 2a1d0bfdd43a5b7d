#include <catch2/catch_amalgamated.hpp>

#include "earsym/earsym.hpp"
#include "helpers.hpp"

using namespace earsym;
using testutil::TempDir;

namespace {

EmbeddingStore random_store(std::uint64_t seed, int count, int dim) {
    Rng rng(seed);
    EmbeddingStore store;
    for (int i = 0; i < count; ++i) {
        Embedding e(dim);
        for (auto& x : e) x = rng.gaussian();
        store.add("img" + std::to_string(i), e);
    }
    return store;
}

}  // namespace

TEST_CASE("store round-trip is bit exact", "[store]") {
    TempDir tmp("store");
    EmbeddingStore store = random_store(50, 100, 512);
    save_store(store, tmp / "e.earb", tmp / "index.csv");
    EmbeddingStore back = load_store(tmp / "e.earb", tmp / "index.csv");

    REQUIRE(back.dim == 512);
    REQUIRE(back.ids == store.ids);
    REQUIRE(back.values.size() == store.values.size());
    for (std::size_t i = 0; i < store.values.size(); ++i)
        REQUIRE(static_cast<float>(back.values[i]) == static_cast<float>(store.values[i]));

    // a second save produces byte-identical files
    save_store(back, tmp / "e2.earb", tmp / "index2.csv");
    REQUIRE(testutil::file_bytes(tmp / "e.earb") == testutil::file_bytes(tmp / "e2.earb"));
    REQUIRE(testutil::file_bytes(tmp / "index.csv") == testutil::file_bytes(tmp / "index2.csv"));
}

TEST_CASE("store header validation", "[store]") {
    TempDir tmp("storehdr");
    EmbeddingStore store = random_store(51, 3, 8);
    save_store(store, tmp / "e.earb", tmp / "index.csv");

    std::string blob = testutil::file_bytes(tmp / "e.earb");
    std::string bad = blob;
    bad[0] = 'X';
    write_text_file(tmp / "bad_magic.earb", bad);
    REQUIRE_THROWS_AS(load_store(tmp / "bad_magic.earb", tmp / "index.csv"), MagicMismatch);

    write_text_file(tmp / "short.earb", blob.substr(0, blob.size() - 5));
    REQUIRE_THROWS_AS(load_store(tmp / "short.earb", tmp / "index.csv"), TruncatedFile);

    write_text_file(tmp / "tiny.earb", "EAR");
    REQUIRE_THROWS_AS(load_store(tmp / "tiny.earb", tmp / "index.csv"), TruncatedFile);

    write_text_file(tmp / "long.earb", blob + "x");
    REQUIRE_THROWS_AS(load_store(tmp / "long.earb", tmp / "index.csv"), ParseError);
}

TEST_CASE("index row count must match the binary store", "[store]") {
    TempDir tmp("storeidx");
    EmbeddingStore store = random_store(52, 4, 8);
    save_store(store, tmp / "e.earb", tmp / "index.csv");

    write_text_file(tmp / "short_index.csv", "row,id\n0,img0\n1,img1\n2,img2\n");
    REQUIRE_THROWS_AS(load_store(tmp / "e.earb", tmp / "short_index.csv"), TruncatedFile);

    write_text_file(tmp / "gap_index.csv", "row,id\n0,img0\n2,img2\n1,img1\n3,img3\n");
    REQUIRE_THROWS_AS(load_store(tmp / "e.earb", tmp / "gap_index.csv"), ParseError);
}

TEST_CASE("store enforces a consistent dimension", "[store]") {
    EmbeddingStore store;
    store.add("a", {1.0, 0.0, 0.0});
    REQUIRE_THROWS_AS(store.add("b", {1.0, 0.0}), DimMismatch);
}

TEST_CASE("default index path sits next to the store", "[store]") {
    REQUIRE(default_index_path("/data/run1/embeddings.earb") == "/data/run1/index.csv");
    REQUIRE(default_index_path("embeddings.earb") == "index.csv");
}

TEST_CASE("f32 quantization matches a save/load cycle", "[store]") {
    TempDir tmp("storeq");
    EmbeddingStore store = random_store(53, 5, 16);
    EmbeddingStore quantized = store;
    quantized.quantize_f32();
    save_store(store, tmp / "e.earb", tmp / "index.csv");
    EmbeddingStore loaded = load_store(tmp / "e.earb", tmp / "index.csv");
    REQUIRE(loaded.values == quantized.values);
}
