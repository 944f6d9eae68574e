#include "cxnprobe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/rng.hpp"
#include "cxnprobe/text.hpp"

namespace cxnprobe {

void FeatureScaler::fit(const Eigen::MatrixXd& X) {
    enabled = true;
    mean = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - mean.transpose();
    Eigen::VectorXd var =
        centered.array().square().colwise().mean().matrix();
    inv_std.resize(var.size());
    for (Eigen::Index i = 0; i < var.size(); ++i) {
        const double sd = std::sqrt(var[i]);
        inv_std[i] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
}

Eigen::MatrixXd FeatureScaler::transform(const Eigen::MatrixXd& X) const {
    if (!enabled) return X;
    return (X.rowwise() - mean.transpose()).array().rowwise() *
           inv_std.transpose().array();
}

double probe_objective(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       int n_classes, double l2, const Eigen::VectorXd& theta,
                       Eigen::VectorXd* grad) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    const Eigen::Index k = n_classes;
    if (theta.size() != k * d + k) throw Error("probe_objective: bad theta size");

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        W(theta.data(), k, d);
    Eigen::Map<const Eigen::VectorXd> b(theta.data() + k * d, k);

    Eigen::MatrixXd logits = X * W.transpose();           // n x k
    logits.rowwise() += b.transpose();

    double nll = 0.0;
    Eigen::MatrixXd probs(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = logits.row(i).maxCoeff();
        Eigen::ArrayXd shifted = (logits.row(i).array() - m).exp();
        const double z = shifted.sum();
        probs.row(i) = (shifted / z).matrix();
        nll -= logits(i, y[static_cast<std::size_t>(i)]) - m - std::log(z);
    }
    nll += 0.5 * l2 * W.squaredNorm();

    if (grad != nullptr) {
        grad->resize(theta.size());
        Eigen::MatrixXd delta = probs;  // p - onehot(y)
        for (Eigen::Index i = 0; i < n; ++i) {
            delta(i, y[static_cast<std::size_t>(i)]) -= 1.0;
        }
        Eigen::MatrixXd grad_w = delta.transpose() * X;  // k x d
        grad_w += l2 * W;
        Eigen::VectorXd grad_b = delta.colwise().sum();
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>(grad->data(), k, d) = grad_w;
        grad->segment(k * d, k) = grad_b;
    }
    return nll;
}

namespace {

// L-BFGS (m = 10) with Armijo backtracking; deterministic from the zero
// initial point.
struct LbfgsResult {
    Eigen::VectorXd theta;
    int iterations = 0;
    double grad_norm = 0.0;
};

template <typename Objective>
LbfgsResult lbfgs_minimize(Objective f, Eigen::Index n_params, double tol,
                           int max_iter) {
    const int memory = 10;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_params);
    Eigen::VectorXd grad(n_params);
    double value = f(theta, &grad);

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    LbfgsResult result;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const double gnorm = grad.lpNorm<Eigen::Infinity>();
        if (gnorm <= tol) break;

        // Two-loop recursion.
        Eigen::VectorXd q = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            const double gamma =
                s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            q *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        Eigen::VectorXd direction = -q;

        double dir_deriv = grad.dot(direction);
        if (dir_deriv >= 0.0) {  // fall back to steepest descent
            direction = -grad;
            dir_deriv = -grad.squaredNorm();
        }

        double step = s_hist.empty() ? 1.0 / std::max(1.0, grad.norm()) : 1.0;
        const double c1 = 1e-4;
        Eigen::VectorXd theta_new;
        Eigen::VectorXd grad_new(n_params);
        double value_new = value;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            theta_new = theta + step * direction;
            value_new = f(theta_new, &grad_new);
            if (value_new <= value + c1 * step * dir_deriv) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // line search stalled at machine precision

        Eigen::VectorXd s = theta_new - theta;
        Eigen::VectorXd yv = grad_new - grad;
        const double sy = s.dot(yv);
        if (sy > 1e-10 * s.norm() * yv.norm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta = std::move(theta_new);
        grad = grad_new;
        value = value_new;
    }
    result.theta = std::move(theta);
    result.iterations = iter;
    result.grad_norm = grad.lpNorm<Eigen::Infinity>();
    return result;
}

}  // namespace

ProbeModel train_probe(const Eigen::MatrixXd& X,
                       const std::vector<std::string>& labels,
                       const ProbeHyperparams& hp) {
    const Eigen::Index n = X.rows();
    if (n == 0 || static_cast<std::size_t>(n) != labels.size()) {
        throw DataError("train_probe: features/labels size mismatch");
    }
    if (!X.allFinite()) throw DataError("train_probe: non-finite features");

    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() < 2) {
        throw DataError("train_probe: needs at least 2 classes in training data");
    }
    std::vector<std::string> classes =
        canonical_label_order({unique.begin(), unique.end()});
    const int k = static_cast<int>(classes.size());
    if (n < k) throw DataError("train_probe: fewer rows than classes");

    std::map<std::string, int> class_index;
    for (int c = 0; c < k; ++c) class_index[classes[static_cast<std::size_t>(c)]] = c;
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = class_index.at(labels[i]);

    ProbeModel model;
    model.classes = std::move(classes);
    model.hyperparams = hp;
    if (hp.standardize) model.scaler.fit(X);
    const Eigen::MatrixXd Xs = model.scaler.transform(X);

    const Eigen::Index d = X.cols();
    auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
        return probe_objective(Xs, y, k, hp.l2, theta, grad);
    };
    LbfgsResult fit = lbfgs_minimize(objective, k * d + k, hp.tol, hp.max_iter);

    model.weights =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>(fit.theta.data(), k, d);
    model.bias = fit.theta.segment(k * d, k);
    model.iterations = fit.iterations;
    model.final_grad_norm = fit.grad_norm;
    return model;
}

std::vector<std::string> ProbeModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != weights.cols()) {
        throw DataError("predict: feature dimension " + std::to_string(X.cols()) +
                        " does not match model dimension " +
                        std::to_string(weights.cols()));
    }
    const Eigen::MatrixXd Xs = scaler.transform(X);
    Eigen::MatrixXd logits = Xs * weights.transpose();
    logits.rowwise() += bias.transpose();
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < logits.cols(); ++c) {
            if (logits(i, c) > logits(i, best)) best = c;  // ties keep lowest index
        }
        out.push_back(classes[static_cast<std::size_t>(best)]);
    }
    return out;
}

Evaluation evaluate(const ProbeModel& model, const Eigen::MatrixXd& X,
                    const std::vector<std::string>& labels) {
    if (static_cast<std::size_t>(X.rows()) != labels.size()) {
        throw DataError("evaluate: features/labels size mismatch");
    }
    std::map<std::string, std::size_t> class_index;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        class_index[model.classes[c]] = c;
    }
    for (const auto& l : labels) {
        if (!class_index.count(l)) {
            throw DataError("evaluate: label '" + l + "' not among model classes");
        }
    }
    const auto predictions = model.predict(X);

    Evaluation eval;
    eval.classes = model.classes;
    eval.confusion.assign(model.classes.size(),
                          std::vector<long long>(model.classes.size(), 0));
    long long correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::size_t t = class_index.at(labels[i]);
        const std::size_t p = class_index.at(predictions[i]);
        eval.confusion[t][p] += 1;
        if (t == p) ++correct;
    }
    eval.accuracy = labels.empty()
                        ? 0.0
                        : static_cast<double>(correct) / static_cast<double>(labels.size());
    return eval;
}

const std::string& ControlLabelMap::label_for(const ConstructionInstance& inst) const {
    auto it = lemma_to_label.find(text::normalize_lemma(inst.noun_lemma));
    if (it == lemma_to_label.end()) {
        throw NotFoundError("no control label for lemma '" + inst.noun_lemma + "'");
    }
    return it->second;
}

ControlLabelMap control_labels(const std::vector<ConstructionInstance>& corpus,
                               const std::vector<std::string>& task_labels,
                               std::uint64_t seed) {
    if (corpus.empty()) throw DataError("control_labels: empty corpus");
    if (corpus.size() != task_labels.size()) {
        throw DataError("control_labels: corpus/labels size mismatch");
    }

    std::map<std::string, long> target;  // task marginals
    for (const auto& l : task_labels) target[l] += 1;
    std::vector<std::string> alphabet;
    for (const auto& [l, n] : target) alphabet.push_back(l);

    std::map<std::string, long> group_size;
    for (const auto& inst : corpus) {
        group_size[text::normalize_lemma(inst.noun_lemma)] += 1;
    }
    std::vector<std::pair<std::string, long>> groups(group_size.begin(), group_size.end());
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });

    SeededRng rng(SeededRng::derive(seed, "control_labels"));
    ControlLabelMap map;
    map.seed = seed;
    std::map<std::string, long> assigned;
    for (const auto& [lemma, size] : groups) {
        // most-deficient label, seeded tie-break
        std::vector<std::string> best;
        long best_deficit = std::numeric_limits<long>::min();
        for (const auto& label : alphabet) {
            const long deficit = target[label] - assigned[label];
            if (deficit > best_deficit) {
                best_deficit = deficit;
                best = {label};
            } else if (deficit == best_deficit) {
                best.push_back(label);
            }
        }
        const std::string& pick =
            best[static_cast<std::size_t>(rng.bounded(best.size()))];
        map.lemma_to_label[lemma] = pick;
        assigned[pick] += size;
    }
    return map;
}

}  // namespace cxnprobe
