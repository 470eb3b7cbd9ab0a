#include "bannerscope/svm.hpp"

#include "bannerscope/error.hpp"
#include "bannerscope/hash.hpp"
#include "bannerscope/io.hpp"
#include "bannerscope/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace bannerscope::ml {

namespace {

double score(const ClassWeights& c, const TfIdfVector& x) { return x.dot(c.w) + c.bias; }

std::string fingerprint_of(const std::vector<LabelRecord>& records, const Vocabulary& vocab) {
    Fnv1a h;
    for (const auto& r : records) {
        h.update(r.text).update("\t").update(to_string(r.label)).update("\t").update(to_string(r.source)).update("\n");
    }
    h.update("\x1d");
    for (const auto& t : vocab.terms()) h.update(t).update("\n");
    return h.hex();
}

/// Pegasos on one binary problem. The bias is the weight of a constant
/// feature, so it is shrunk and projected together with w.
ClassWeights pegasos(const std::vector<TfIdfVector>& xs, const std::vector<int>& ys, std::size_t dim,
                     const SvmParams& params, std::vector<EpochObjective>* trace) {
    const double lambda = params.lambda;
    const double radius = 1.0 / std::sqrt(lambda);
    ClassWeights cur;
    cur.w.assign(dim, 0.0);
    cur.trained = true;
    ClassWeights best = cur;
    double best_obj = svm_objective(best, xs, ys, lambda);

    SeededRng rng(params.seed);
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double y = ys[i];
            const bool violated = y * score(cur, xs[i]) < 1.0;
            const double shrink = 1.0 - eta * lambda;
            for (double& v : cur.w) v *= shrink;
            cur.bias *= shrink;
            if (violated) {
                for (const auto& [idx, val] : xs[i].entries) cur.w[idx] += eta * y * val;
                cur.bias += eta * y;
            }
            if (params.project) {
                double sq = cur.bias * cur.bias;
                for (double v : cur.w) sq += v * v;
                const double norm = std::sqrt(sq);
                if (norm > radius) {
                    const double f = radius / norm;
                    for (double& v : cur.w) v *= f;
                    cur.bias *= f;
                }
            }
        }
        const double obj = svm_objective(cur, xs, ys, lambda);
        if (obj < best_obj) {
            best_obj = obj;
            best = cur;
        }
        if (trace) trace->push_back({obj, best_obj});
    }
    return best;
}

} // namespace

double svm_objective(const ClassWeights& weights, const std::vector<TfIdfVector>& xs, const std::vector<int>& ys,
                     double lambda) {
    double sq = weights.bias * weights.bias;
    for (double v : weights.w) sq += v * v;
    double loss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) loss += std::max(0.0, 1.0 - ys[i] * score(weights, xs[i]));
    return 0.5 * lambda * sq + (xs.empty() ? 0.0 : loss / static_cast<double>(xs.size()));
}

LinearModel train_svm(const std::vector<LabelRecord>& records, const Vocabulary& vocab, const SvmParams& params,
                      TrainingTrace* trace) {
    if (!(params.lambda > 0)) throw PreconditionError("lambda must be positive");
    if (params.epochs < 1) throw PreconditionError("epochs must be at least 1");
    std::set<ButtonClass> present;
    for (const auto& r : records) present.insert(r.label);
    if (present.size() < 2) {
        throw InsufficientClasses("training needs at least two classes, got " + std::to_string(present.size()));
    }

    std::vector<TfIdfVector> xs;
    xs.reserve(records.size());
    for (const auto& r : records) xs.push_back(vectorize(r.text, vocab));

    LinearModel model;
    model.vocabulary = vocab;
    model.params = params;
    model.fingerprint = fingerprint_of(records, vocab);
    if (trace) *trace = {};
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const ButtonClass cls = kAllClasses[c];
        if (!present.contains(cls)) {
            model.classes[c].w.assign(vocab.size(), 0.0);
            continue;
        }
        std::vector<int> ys;
        ys.reserve(records.size());
        for (const auto& r : records) ys.push_back(r.label == cls ? 1 : -1);
        model.classes[c] = pegasos(xs, ys, vocab.size(), params, trace ? &trace->epochs[c] : nullptr);
    }
    return model;
}

LinearModel train_from_records(const std::vector<LabelRecord>& records, const SvmParams& params,
                               TrainingTrace* trace) {
    std::vector<std::string> texts;
    texts.reserve(records.size());
    for (const auto& r : records) texts.push_back(r.text);
    return train_svm(records, build_vocabulary(texts, 1), params, trace);
}

Prediction predict(const LinearModel& model, const TfIdfVector& x) {
    const std::size_t dim = model.dimension();
    for (const auto& [idx, w] : x.entries) {
        if (idx >= dim) throw DimensionMismatch("feature index " + std::to_string(idx) + " outside model dimension " +
                                                std::to_string(dim));
    }
    Prediction p;
    int top = -1;
    int second = -1;
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const auto& cw = model.classes[c];
        if (cw.w.size() != dim) throw DimensionMismatch("class weight vector does not match the vocabulary");
        p.scores[c] = score(cw, x);
        if (!cw.trained) continue;
        const int ci = static_cast<int>(c);
        if (top < 0 || p.scores[c] > p.scores[static_cast<std::size_t>(top)]) {
            second = top;
            top = ci;
        } else if (second < 0 || p.scores[c] > p.scores[static_cast<std::size_t>(second)]) {
            second = ci;
        }
    }
    if (top < 0) throw PreconditionError("model has no trained classes");
    p.label = kAllClasses[static_cast<std::size_t>(top)];
    p.margin = second < 0 ? 0.0 : p.scores[static_cast<std::size_t>(top)] - p.scores[static_cast<std::size_t>(second)];
    return p;
}

Prediction predict(const LinearModel& model, std::string_view text, const Vocabulary& vocab) {
    if (vocab.size() != model.dimension()) {
        throw DimensionMismatch("vocabulary has " + std::to_string(vocab.size()) + " terms, model expects " +
                                std::to_string(model.dimension()));
    }
    return predict(model, vectorize(text, vocab));
}

Prediction predict(const LinearModel& model, std::string_view text) {
    return predict(model, vectorize(text, model.vocabulary));
}

std::string model_to_json(const LinearModel& model) {
    nlohmann::ordered_json j;
    j["format"] = "bannerscope-linear-model";
    j["version"] = 1;
    j["params"] = {{"lambda", model.params.lambda},
                   {"epochs", model.params.epochs},
                   {"seed", model.params.seed},
                   {"project", model.params.project}};
    j["fingerprint"] = model.fingerprint;
    j["vocabulary"] = {{"document_count", model.vocabulary.document_count()},
                       {"terms", model.vocabulary.terms()},
                       {"document_frequency", model.vocabulary.document_frequency()}};
    auto classes = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const auto& cw = model.classes[c];
        classes[std::string(to_string(kAllClasses[c]))] = {
            {"trained", cw.trained}, {"bias", cw.bias}, {"weights", cw.w}};
    }
    j["classes"] = std::move(classes);
    return j.dump(1) + "\n";
}

LinearModel model_from_json(std::string_view json) {
    try {
        const auto j = nlohmann::json::parse(json);
        if (j.value("format", "") != "bannerscope-linear-model") throw FormatError(0, "not a model file");
        LinearModel m;
        const auto& p = j.at("params");
        m.params.lambda = p.at("lambda").get<double>();
        m.params.epochs = p.at("epochs").get<int>();
        m.params.seed = p.at("seed").get<std::uint64_t>();
        m.params.project = p.value("project", true);
        m.fingerprint = j.at("fingerprint").get<std::string>();
        const auto& v = j.at("vocabulary");
        m.vocabulary = Vocabulary(v.at("terms").get<std::vector<std::string>>(),
                                  v.at("document_frequency").get<std::vector<std::size_t>>(),
                                  v.at("document_count").get<std::size_t>());
        const auto& cs = j.at("classes");
        for (std::size_t c = 0; c < kClassCount; ++c) {
            const auto& cj = cs.at(std::string(to_string(kAllClasses[c])));
            auto& cw = m.classes[c];
            cw.trained = cj.at("trained").get<bool>();
            cw.bias = cj.at("bias").get<double>();
            cw.w = cj.at("weights").get<std::vector<double>>();
            if (cw.w.size() != m.vocabulary.size()) throw FormatError(0, "weight vector length differs from vocabulary");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(0, std::string("malformed model: ") + e.what());
    } catch (const PreconditionError& e) {
        throw FormatError(0, std::string("malformed model: ") + e.what());
    }
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
    io::write_file_atomic(path, model_to_json(model));
}

LinearModel load_model(const std::filesystem::path& path) { return model_from_json(io::read_file(path)); }

} // namespace bannerscope::ml
