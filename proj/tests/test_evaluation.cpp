#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alsim/evaluation.hpp"
#include "support.hpp"

using namespace alsim;
using testsupport::det;
using testsupport::ref_ap_all_points;
using testsupport::ref_ap_eleven_point;
using testsupport::ref_iou;
using testsupport::ref_match;

namespace {

BoxGeometry box(double x_min, double y_min, double x_max, double y_max) {
    return BoxGeometry{x_min, y_min, x_max, y_max};
}

MatchResult outcomes(std::vector<std::pair<double, bool>> rows, std::size_t gt_count) {
    MatchResult result;
    result.gt_count = gt_count;
    for (const auto& [confidence, tp] : rows) {
        result.detections.push_back({confidence, tp});
    }
    return result;
}

}  // namespace

TEST_CASE("iou on hand-checked pairs") {
    CHECK(iou(box(0, 0, 10, 10), box(0, 0, 10, 10)) == 1.0);
    CHECK(iou(box(0, 0, 10, 10), box(20, 20, 30, 30)) == 0.0);
    CHECK(iou(box(0, 0, 10, 10), box(5, 0, 15, 10)) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(iou(box(0, 0, 10, 10), box(10, 0, 20, 10)) == 0.0);  // shared edge only
    CHECK(iou(box(0, 0, 10, 10), box(2, 2, 4, 4)) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(iou(box(0, 0, 10, 10), box(0, 0, 10, 5)) == 0.5);
}

TEST_CASE("iou is symmetric and bounded on fuzzed boxes") {
    DetRng rng(51);
    for (int i = 0; i < 2000; ++i) {
        const auto draw_box = [&] {
            const double x = rng.next_index(20);
            const double y = rng.next_index(20);
            const double w = 1.0 + rng.next_index(10);
            const double h = 1.0 + rng.next_index(10);
            return box(x, y, x + w, y + h);
        };
        const BoxGeometry a = draw_box();
        const BoxGeometry b = draw_box();
        const double forward = iou(a, b);
        CHECK(forward == iou(b, a));
        CHECK(forward >= 0.0);
        CHECK(forward <= 1.0);
        CHECK(forward == doctest::Approx(ref_iou(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("single matching detection is a true positive") {
    const auto result =
        match_detections({{box(0, 0, 10, 10), 0.9}}, {box(0, 0, 10, 10)}, 0.5);
    REQUIRE(result.detections.size() == 1);
    CHECK(result.detections[0].true_positive);
    CHECK(result.detections[0].confidence == 0.9);
    CHECK(result.gt_count == 1);
}

TEST_CASE("two detections on one ground truth: higher confidence wins") {
    const auto result = match_detections(
        {{box(0, 0, 10, 10), 0.8}, {box(0, 0, 10, 11), 0.9}}, {box(0, 0, 10, 10)}, 0.5);
    REQUIRE(result.detections.size() == 2);
    // Outcomes come back in descending confidence order.
    CHECK(result.detections[0].confidence == 0.9);
    CHECK(result.detections[0].true_positive);
    CHECK(result.detections[1].confidence == 0.8);
    CHECK_FALSE(result.detections[1].true_positive);
}

TEST_CASE("equal-iou candidates resolve to the earliest ground-truth index") {
    // The first detection overlaps both halves at exactly 0.5; it must claim
    // the first, leaving the second detection (which only covers the first
    // half) unmatched.
    const std::vector<BoxGeometry> gts{box(0, 0, 10, 5), box(0, 5, 10, 10)};
    const auto result = match_detections(
        {{box(0, 0, 10, 10), 0.9}, {box(0, 0, 10, 5), 0.8}}, gts, 0.5);
    CHECK(result.detections[0].true_positive);
    CHECK_FALSE(result.detections[1].true_positive);
}

TEST_CASE("confidence ties keep input order") {
    // Both detections clear the threshold on the single ground truth; the
    // one listed first claims it even though the second overlaps better.
    const auto result = match_detections(
        {{box(0, 0, 10, 8), 0.7}, {box(0, 0, 10, 10), 0.7}}, {box(0, 0, 10, 10)}, 0.5);
    CHECK(result.detections[0].true_positive);
    CHECK_FALSE(result.detections[1].true_positive);
}

TEST_CASE("an overlap exactly at the threshold counts as a match") {
    const auto result =
        match_detections({{box(0, 0, 10, 5), 0.9}}, {box(0, 0, 10, 10)}, 0.5);
    CHECK(result.detections[0].true_positive);
}

TEST_CASE("match_detections rejects thresholds outside (0, 1]") {
    CHECK_THROWS_AS(match_detections({}, {}, 0.0), std::domain_error);
    CHECK_THROWS_AS(match_detections({}, {}, -0.5), std::domain_error);
    CHECK_THROWS_AS(match_detections({}, {}, 1.5), std::domain_error);
    CHECK_NOTHROW(match_detections({}, {}, 1.0));
}

TEST_CASE("pr curve accumulates counts in confidence order") {
    const auto matches = outcomes({{0.9, true}, {0.8, false}, {0.7, true}}, 2);
    const PRCurve curve = compute_pr_curve(matches);
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.points[0].recall == 0.5);
    CHECK(curve.points[0].precision == 1.0);
    CHECK(curve.points[1].recall == 0.5);
    CHECK(curve.points[1].precision == 0.5);
    CHECK(curve.points[2].recall == 1.0);
    CHECK(curve.points[2].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("average precision on hand-checked outcome lists") {
    CHECK(average_precision(outcomes({{0.9, true}}, 1)).value() == 1.0);
    CHECK(average_precision(outcomes({{0.9, true}, {0.8, false}}, 1)).value() == 1.0);
    CHECK(average_precision(outcomes({{0.9, false}, {0.8, true}}, 1)).value() == 0.5);
    const auto mixed = outcomes({{0.9, true}, {0.8, false}, {0.7, true}}, 2);
    CHECK(average_precision(mixed, ApInterpolation::kAllPoints).value() ==
          doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(average_precision(mixed, ApInterpolation::kElevenPoint).value() ==
          doctest::Approx(28.0 / 33.0).epsilon(1e-12));
}

TEST_CASE("average precision without detections is zero, without ground truth undefined") {
    CHECK(average_precision(outcomes({}, 3)).value() == 0.0);
    CHECK_FALSE(average_precision(outcomes({}, 0)).has_value());
    CHECK_FALSE(average_precision(outcomes({{0.9, false}}, 0)).has_value());
}

TEST_CASE("matching and ap agree with the reference implementation on fuzzed scenes") {
    DetRng rng(61);
    for (int trial = 0; trial < 2000; ++trial) {
        // Coarse coordinate and confidence grids force frequent exact ties.
        const auto draw_box = [&] {
            const double x = rng.next_index(6) * 5.0;
            const double y = rng.next_index(6) * 5.0;
            const double w = 5.0 * (1 + rng.next_index(3));
            const double h = 5.0 * (1 + rng.next_index(3));
            return box(x, y, x + w, y + h);
        };
        std::vector<BoxGeometry> gts(rng.next_index(4));
        for (auto& g : gts) {
            g = draw_box();
        }
        std::vector<std::pair<BoxGeometry, double>> dets(rng.next_index(6));
        for (auto& d : dets) {
            d = {draw_box(), (1.0 + rng.next_index(9)) / 10.0};
        }
        const auto got = match_detections(dets, gts, 0.5);
        const auto want = ref_match(dets, gts, 0.5);
        REQUIRE(got.detections.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.detections[i].confidence == want[i].confidence);
            CHECK(got.detections[i].true_positive == want[i].true_positive);
        }
        if (!gts.empty()) {
            std::vector<testsupport::RefOutcome> ref_rows;
            for (const auto& d : got.detections) {
                ref_rows.push_back({d.confidence, d.true_positive});
            }
            CHECK(average_precision(got, ApInterpolation::kAllPoints).value() ==
                  doctest::Approx(ref_ap_all_points(ref_rows, gts.size())).epsilon(1e-12));
            CHECK(average_precision(got, ApInterpolation::kElevenPoint).value() ==
                  doctest::Approx(ref_ap_eleven_point(ref_rows, gts.size())).epsilon(1e-12));
        }
    }
}

TEST_CASE("adding an unmatched detection never raises average precision") {
    DetRng rng(62);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<BoxGeometry> gts(1 + rng.next_index(3));
        std::vector<std::pair<BoxGeometry, double>> dets;
        for (auto& g : gts) {
            const double x = rng.next_index(8) * 10.0;
            const double y = rng.next_index(8) * 10.0;
            g = box(x, y, x + 10.0, y + 10.0);
            if (rng.next_double() < 0.7) {
                dets.push_back({g, (1.0 + rng.next_index(9)) / 10.0});
            }
        }
        const double before =
            average_precision(match_detections(dets, gts, 0.5)).value();
        dets.push_back({box(1000, 1000, 1010, 1010), (1.0 + rng.next_index(9)) / 10.0});
        const double after =
            average_precision(match_detections(dets, gts, 0.5)).value();
        CHECK(after <= before + 1e-12);
    }
}

TEST_CASE("mean_ap averages only classes with ground truth") {
    CHECK(mean_ap({{"a", 4, 0.5}, {"b", 2, 1.0}}) == 0.75);
    CHECK(mean_ap({{"a", 4, 0.5}, {"b", 0, std::nullopt}}) == 0.5);
    CHECK(mean_ap({{"a", 1, 1.0}}) == 1.0);
    CHECK_THROWS_AS(mean_ap({{"a", 0, std::nullopt}, {"b", 0, std::nullopt}}),
                    std::domain_error);
    CHECK_THROWS_AS(mean_ap({}), std::domain_error);
}

namespace {

DatasetIndex two_class_fixture() {
    DatasetIndex index;
    index.categories.names = {"cat", "dog"};
    index.images = {"img_1", "img_2"};
    GroundTruthAnnotation a1;
    a1.image_id = "img_1";
    a1.boxes.push_back({box(0, 0, 10, 10), 1});
    a1.boxes.push_back({box(20, 20, 30, 30), 2});
    GroundTruthAnnotation a2;
    a2.image_id = "img_2";
    a2.boxes.push_back({box(0, 0, 10, 10), 1});
    index.annotations = {{"img_1", a1}, {"img_2", a2}};
    index.validate();
    return index;
}

}  // namespace

TEST_CASE("evaluate_predictions scores a perfect prediction set at exactly one") {
    const DatasetIndex index = two_class_fixture();
    std::vector<ImagePrediction> predictions(2);
    predictions[0].image_id = "img_1";
    predictions[0].detections.push_back(det(box(0, 0, 10, 10), {1.0, 0.0}));
    predictions[0].detections.push_back(det(box(20, 20, 30, 30), {0.0, 1.0}));
    predictions[1].image_id = "img_2";
    predictions[1].detections.push_back(det(box(0, 0, 10, 10), {1.0, 0.0}));

    const EvaluationResult result = evaluate_predictions(index, predictions);
    CHECK(result.map == 1.0);
    REQUIRE(result.per_class.size() == 2);
    CHECK(result.per_class[0].category == "cat");
    CHECK(result.per_class[0].gt_count == 2);
    CHECK(result.per_class[0].ap.value() == 1.0);
    CHECK(result.per_class[1].gt_count == 1);
    CHECK(result.per_class[1].ap.value() == 1.0);
}

TEST_CASE("detections land in their argmax class") {
    const DatasetIndex index = two_class_fixture();
    std::vector<ImagePrediction> predictions(1);
    predictions[0].image_id = "img_1";
    // Box sits on the cat ground truth but the distribution votes dog.
    predictions[0].detections.push_back(det(box(0, 0, 10, 10), {0.3, 0.7}));

    const EvaluationResult result = evaluate_predictions(index, predictions);
    CHECK(result.per_class[0].ap.value() == 0.0);  // cat: no true positives
    CHECK(result.per_class[1].ap.value() == 0.0);  // dog: one false positive
}

TEST_CASE("per-class curves pool detections across images") {
    const DatasetIndex index = two_class_fixture();
    std::vector<ImagePrediction> predictions(2);
    predictions[0].image_id = "img_1";
    predictions[0].detections.push_back(det(box(0, 0, 10, 10), {0.9, 0.1}));
    predictions[1].image_id = "img_2";
    // Higher-confidence cat false positive in the other image drags the
    // class curve down; per-image evaluation would report 1.0 instead.
    predictions[1].detections.push_back(det(box(50, 50, 60, 60), {0.95, 0.05}));

    const EvaluationResult result = evaluate_predictions(index, predictions);
    // Combined cat curve: FP at 0.95 then TP at 0.9 over two boxes -> 0.25.
    CHECK(result.per_class[0].ap.value() == 0.25);
}

TEST_CASE("images without predictions count as missed ground truth") {
    const DatasetIndex index = two_class_fixture();
    const EvaluationResult result = evaluate_predictions(index, {});
    CHECK(result.map == 0.0);
    CHECK(result.per_class[0].gt_count == 2);
}

TEST_CASE("evaluate_predictions rejects malformed prediction sets") {
    const DatasetIndex index = two_class_fixture();
    std::vector<ImagePrediction> duplicate(2);
    duplicate[0].image_id = "img_1";
    duplicate[1].image_id = "img_1";
    CHECK_THROWS_AS(evaluate_predictions(index, duplicate), ValidationError);

    std::vector<ImagePrediction> unknown(1);
    unknown[0].image_id = "img_9";
    CHECK_THROWS_AS(evaluate_predictions(index, unknown), ValidationError);
}

TEST_CASE("classes without ground truth stay out of the mean even with detections") {
    DatasetIndex index;
    index.categories.names = {"cat", "dog"};
    index.images = {"img_1"};
    GroundTruthAnnotation a1;
    a1.image_id = "img_1";
    a1.boxes.push_back({box(0, 0, 10, 10), 1});
    index.annotations = {{"img_1", a1}};
    index.validate();

    std::vector<ImagePrediction> predictions(1);
    predictions[0].image_id = "img_1";
    predictions[0].detections.push_back(det(box(0, 0, 10, 10), {0.9, 0.1}));
    predictions[0].detections.push_back(det(box(40, 40, 50, 50), {0.1, 0.9}));

    const EvaluationResult result = evaluate_predictions(index, predictions);
    CHECK(result.map == 1.0);
    CHECK_FALSE(result.per_class[1].ap.has_value());
    CHECK(result.per_class[1].gt_count == 0);
}

TEST_CASE("ground truth replayed as one-hot predictions is always perfect") {
    DetRng rng(63);
    DatasetIndex index;
    index.categories.names = {"c1", "c2", "c3"};
    for (int i = 0; i < 20; ++i) {
        const std::string id = "img_" + std::to_string(i);
        index.images.push_back(id);
        GroundTruthAnnotation annotation;
        annotation.image_id = id;
        const std::size_t n = rng.next_index(5);
        for (std::size_t b = 0; b < n; ++b) {
            const double x = rng.next_index(50) * 10.0;
            const double y = rng.next_index(50) * 10.0;
            annotation.boxes.push_back(
                {box(x, y, x + 10.0 + rng.next_index(20), y + 10.0 + rng.next_index(20)),
                 1 + static_cast<int>(rng.next_index(3))});
        }
        index.annotations[id] = annotation;
    }
    index.validate();

    std::vector<ImagePrediction> predictions;
    for (const auto& id : index.images) {
        ImagePrediction prediction;
        prediction.image_id = id;
        for (const auto& gt : index.annotation_for(id).boxes) {
            std::vector<double> probs(3, 0.0);
            probs[static_cast<std::size_t>(gt.category - 1)] = 1.0;
            prediction.detections.push_back(det(gt.geometry, std::move(probs)));
        }
        predictions.push_back(std::move(prediction));
    }
    const EvaluationResult result = evaluate_predictions(index, predictions);
    CHECK(result.map == 1.0);
}

TEST_CASE("interpolation names parse and print") {
    CHECK(to_string(ApInterpolation::kAllPoints) == "all");
    CHECK(to_string(ApInterpolation::kElevenPoint) == "11point");
    CHECK(parse_interpolation("11point") == ApInterpolation::kElevenPoint);
    CHECK_FALSE(parse_interpolation("area").has_value());
}
