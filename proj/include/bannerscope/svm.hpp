#pragma once

// One-vs-rest linear SVM over TF-IDF label vectors, trained with Pegasos
// (stochastic subgradient descent on the L2-regularized hinge loss).

#include "bannerscope/labels.hpp"
#include "bannerscope/tfidf.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace bannerscope::ml {

struct SvmParams {
    double lambda = 1e-3;
    int epochs = 50;
    std::uint64_t seed = 42;
    /// Project each iterate onto the ball of radius 1/sqrt(lambda).
    bool project = true;

    friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

struct ClassWeights {
    std::vector<double> w; // one weight per vocabulary term
    double bias = 0.0;
    bool trained = false;

    friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

struct LinearModel {
    Vocabulary vocabulary;
    std::array<ClassWeights, kClassCount> classes;
    SvmParams params;
    std::string fingerprint; // FNV-1a over training records and vocabulary

    std::size_t dimension() const noexcept { return vocabulary.size(); }
    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Regularized objective per epoch for one binary problem. `iterate` is the
/// raw Pegasos iterate at the end of the epoch, `retained` the best iterate
/// seen so far (the one the model keeps).
struct EpochObjective {
    double iterate = 0.0;
    double retained = 0.0;
};

struct TrainingTrace {
    /// Indexed by class; empty for classes absent from the records.
    std::array<std::vector<EpochObjective>, kClassCount> epochs;
};

/// lambda/2 * |w|^2 + mean hinge loss, with the bias treated as one more
/// (regularized) weight on a constant feature of 1.
double svm_objective(const ClassWeights& weights, const std::vector<TfIdfVector>& xs, const std::vector<int>& ys,
                     double lambda);

/// Throws InsufficientClasses when fewer than two classes occur in records.
LinearModel train_svm(const std::vector<LabelRecord>& records, const Vocabulary& vocab, const SvmParams& params = {},
                      TrainingTrace* trace = nullptr);

/// Vocabulary over the record texts, then train_svm.
LinearModel train_from_records(const std::vector<LabelRecord>& records, const SvmParams& params = {},
                               TrainingTrace* trace = nullptr);

struct Prediction {
    ButtonClass label = ButtonClass::Other;
    double margin = 0.0; // top score minus runner-up
    std::array<double, kClassCount> scores{};
};

/// Argmax over the trained classes; ties go to the earlier ButtonClass.
/// Throws DimensionMismatch if the vector indexes past the model dimension.
Prediction predict(const LinearModel& model, const TfIdfVector& x);
/// Throws DimensionMismatch unless vocab has the model's dimension.
Prediction predict(const LinearModel& model, std::string_view text, const Vocabulary& vocab);
Prediction predict(const LinearModel& model, std::string_view text);

std::string model_to_json(const LinearModel& model);
/// Throws FormatError.
LinearModel model_from_json(std::string_view json);
/// Writes through a temporary file and a rename. Throws IoError.
void save_model(const LinearModel& model, const std::filesystem::path& path);
/// Throws IoError or FormatError.
LinearModel load_model(const std::filesystem::path& path);

} // namespace bannerscope::ml
