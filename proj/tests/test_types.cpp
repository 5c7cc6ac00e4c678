#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>

#include "alsim/rng.hpp"
#include "alsim/types.hpp"
#include "support.hpp"

using namespace alsim;
using testsupport::random_simplex;

TEST_CASE("validated accepts an exact simplex unchanged") {
    const std::vector<double> probs{0.7, 0.2, 0.1};
    const ClassDistribution d = ClassDistribution::validated(probs, "t");
    CHECK(d.probs == probs);
}

TEST_CASE("validated leaves tiny floating-point deviations bit-identical") {
    // fl(0.1 + 0.2 + 0.7) != 1, but the deviation is far below 1e-12.
    const std::vector<double> probs{0.1, 0.2, 0.7};
    const ClassDistribution d = ClassDistribution::validated(probs, "t");
    CHECK(d.probs[0] == 0.1);
    CHECK(d.probs[1] == 0.2);
    CHECK(d.probs[2] == 0.7);
}

TEST_CASE("validated renormalizes deviations inside the tolerance") {
    const ClassDistribution d = ClassDistribution::validated({0.7, 0.300001}, "t");
    double sum = 0.0;
    for (const double p : d.probs) {
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.probs[1] != 0.300001);  // actually rescaled
}

TEST_CASE("validated rejects sums outside the tolerance") {
    CHECK_THROWS_AS(ClassDistribution::validated({0.6, 0.3}, "t"), ValidationError);
    CHECK_THROWS_AS(ClassDistribution::validated({0.6, 0.5}, "t"), ValidationError);
}

TEST_CASE("validated rejects malformed entries") {
    CHECK_THROWS_AS(ClassDistribution::validated({}, "t"), ValidationError);
    CHECK_THROWS_AS(ClassDistribution::validated({1.2, -0.2}, "t"), ValidationError);
    CHECK_THROWS_AS(ClassDistribution::validated({0.5, -0.1, 0.6}, "t"), ValidationError);
    const double nan = std::nan("");
    CHECK_THROWS_AS(ClassDistribution::validated({nan, 1.0}, "t"), ValidationError);
}

TEST_CASE("validated is idempotent bit-for-bit") {
    DetRng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t d = 2 + rng.next_index(9);
        const ClassDistribution once = ClassDistribution::validated(random_simplex(rng, d), "t");
        const ClassDistribution twice = ClassDistribution::validated(once.probs, "t");
        REQUIRE(once.probs == twice.probs);
    }
}

TEST_CASE("argmax breaks ties toward the lowest index") {
    const ClassDistribution d = ClassDistribution::validated({0.25, 0.375, 0.375}, "t");
    CHECK(d.argmax() == 1);
    CHECK(d.max_prob() == 0.375);
}

TEST_CASE("detection confidence equals the distribution maximum") {
    const Detection d = testsupport::det(BoxGeometry{0, 0, 1, 1}, {0.2, 0.5, 0.3});
    CHECK(d.confidence == 0.5);
    CHECK(d.predicted_class() == 1);
}

TEST_CASE("box geometry accessors and validity") {
    const BoxGeometry box{1.0, 2.0, 4.0, 6.0};
    CHECK(box.width() == 3.0);
    CHECK(box.height() == 4.0);
    CHECK(box.area() == 12.0);
    CHECK(box.valid());

    CHECK_FALSE(BoxGeometry{1.0, 0.0, 1.0, 2.0}.valid());  // zero width
    CHECK_FALSE(BoxGeometry{2.0, 0.0, 1.0, 2.0}.valid());  // inverted
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_FALSE(BoxGeometry{0.0, 0.0, inf, 2.0}.valid());
}

namespace {

DatasetIndex small_index() {
    DatasetIndex index;
    index.categories.names = {"cat", "dog"};
    index.images = {"a", "b"};
    GroundTruthAnnotation annotation;
    annotation.image_id = "a";
    annotation.boxes.push_back(GroundTruthBox{BoxGeometry{0, 0, 10, 10}, 1});
    index.annotations["a"] = annotation;
    return index;
}

}  // namespace

TEST_CASE("dataset index validates cleanly and answers lookups") {
    const DatasetIndex index = small_index();
    index.validate();
    CHECK(index.has_image("a"));
    CHECK(index.has_image("b"));
    CHECK_FALSE(index.has_image("c"));
    CHECK(index.annotation_for("a").boxes.size() == 1);
    CHECK(index.annotation_for("b").boxes.empty());  // unannotated image
}

TEST_CASE("dataset index invariant violations") {
    SUBCASE("duplicate image ids") {
        DatasetIndex index = small_index();
        index.images.push_back("a");
        CHECK_THROWS_AS(index.validate(), ValidationError);
    }
    SUBCASE("annotation for unknown image") {
        DatasetIndex index = small_index();
        GroundTruthAnnotation stray;
        stray.image_id = "ghost";
        index.annotations["ghost"] = stray;
        CHECK_THROWS_AS(index.validate(), ValidationError);
    }
    SUBCASE("category index out of range") {
        DatasetIndex index = small_index();
        index.annotations["a"].boxes[0].category = 5;
        CHECK_THROWS_AS(index.validate(), ValidationError);
        index.annotations["a"].boxes[0].category = 0;
        CHECK_THROWS_AS(index.validate(), ValidationError);
    }
    SUBCASE("degenerate box") {
        DatasetIndex index = small_index();
        index.annotations["a"].boxes[0].geometry = BoxGeometry{5, 0, 5, 10};
        CHECK_THROWS_AS(index.validate(), ValidationError);
    }
    SUBCASE("empty category set") {
        DatasetIndex index = small_index();
        index.categories.names.clear();
        index.annotations["a"].boxes.clear();
        CHECK_THROWS_AS(index.validate(), ValidationError);
    }
    SUBCASE("duplicate category names") {
        DatasetIndex index = small_index();
        index.categories.names = {"cat", "cat"};
        CHECK_THROWS_AS(index.validate(), ValidationError);
    }
}

TEST_CASE("rng streams are deterministic and decorrelated by tag") {
    DetRng a = DetRng::derive(42, "img_1");
    DetRng b = DetRng::derive(42, "img_1");
    DetRng c = DetRng::derive(42, "img_2");
    DetRng d = DetRng::derive(43, "img_1");
    const double va = a.next_double();
    CHECK(va == b.next_double());
    CHECK(va != c.next_double());
    CHECK(va != d.next_double());
}

TEST_CASE("rng salt separates streams for the same tag") {
    DetRng a = DetRng::derive(42, "img_1", 10);
    DetRng b = DetRng::derive(42, "img_1", 11);
    CHECK(a.next_double() != b.next_double());
}

TEST_CASE("rng outputs stay in range") {
    DetRng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double s = rng.next_signed();
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
        const std::uint64_t k = rng.next_index(13);
        CHECK(k < 13);
    }
}
