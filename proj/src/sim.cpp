#include "uiobs/sim.hpp"

#include <cmath>

namespace uiobs {

double SignalSpec::eval(double t) const {
    double v = offset;
    for (const auto& s : sinusoids) v += s.amplitude * std::sin(s.omega * t + s.phase);
    return v;
}

double SignalSpec::eval_rate(double t) const {
    double v = 0.0;
    for (const auto& s : sinusoids) v += s.amplitude * s.omega * std::cos(s.omega * t + s.phase);
    return v;
}

double SignalSpec::amplitude_bound() const {
    double v = std::abs(offset);
    for (const auto& s : sinusoids) v += std::abs(s.amplitude);
    return v;
}

Eigen::VectorXd eval_disturbance(const std::vector<SignalSpec>& spec, double t) {
    Eigen::VectorXd d(spec.size());
    for (size_t i = 0; i < spec.size(); ++i) d(i) = spec[i].eval(t);
    return d;
}

Eigen::VectorXd eval_disturbance_rate(const std::vector<SignalSpec>& spec, double t) {
    Eigen::VectorXd d(spec.size());
    for (size_t i = 0; i < spec.size(); ++i) d(i) = spec[i].eval_rate(t);
    return d;
}

void Scenario::validate() const {
    plant.validate();
    if (plant.has_feedthrough())
        throw DimensionError("Scenario: simulate the feedthrough-free reduced plant");
    if (!(step > 0.0)) throw DimensionError("Scenario: step must be positive");
    if (horizon < step) throw DimensionError("Scenario: horizon must be >= step");
    if (x0.size() != plant.n()) throw DimensionError("Scenario: x0 size mismatch");
    if (xhat0.size() != observer.n()) throw DimensionError("Scenario: xhat0 size mismatch");
    if (static_cast<int>(disturbance.size()) != plant.m())
        throw DimensionError("Scenario: one disturbance signal per unknown input required");
    for (int i = 0; i < plant.m(); ++i)
        if (disturbance[i].amplitude_bound() > plant.bounds(i) * (1.0 + 1e-12))
            throw DimensionError("Scenario: disturbance amplitude exceeds declared bound");
    if (!control.open_loop.empty() &&
        static_cast<int>(control.open_loop.size()) != plant.q())
        throw DimensionError("Scenario: open-loop signal count != q");
    if (control.feedback) {
        if (control.feedback->K.rows() != plant.q() ||
            control.feedback->K.cols() != plant.n() ||
            control.feedback->h.size() != plant.q())
            throw DimensionError("Scenario: feedback dimensions mismatch");
    }
    const int n_o = observer.n(), n_p = plant.n();
    if (n_o != n_p && n_o != n_p + 1)
        throw DimensionError("Scenario: observer order must be n or n+1 (augmented)");
    if (nf.T.rows() != n_o) throw DimensionError("Scenario: nf/observer order mismatch");
}

Trace simulate(const Scenario& sc) {
    sc.validate();
    const int n_p = sc.plant.n();
    const int n_o = sc.observer.n();
    const int q = sc.plant.q();
    const bool augmented = (n_o == n_p + 1);

    const long steps = std::lround(sc.horizon / sc.step);
    // Finer grid for the discontinuous injection: the error dynamics are
    // autonomous given the disturbance, so refining them does not touch the
    // plant integration or the trace cadence.
    const int substeps = 10;
    const double hs = sc.step / substeps;
    Trace tr;
    tr.times.reserve(steps + 1);

    Eigen::VectorXd x = sc.x0;
    // Estimation error in transformed coordinates: ebar = T^-1 chi - xhat,
    // where chi is the state of the system the observer was built for
    // (the plant state, padded with Delta in the augmented case). Its
    // dynamics ebar' = Abar ebar + Dbar delta_in - Pi sigma - l(sigma) with
    // sigma = Cbar ebar do not involve u, so error traces are exactly
    // independent of the control.
    const Eigen::FullPivLU<Eigen::MatrixXd> luT(sc.nf.T);
    Eigen::VectorXd chi0(n_o);
    if (augmented)
        chi0 << sc.x0, eval_disturbance(sc.disturbance, 0.0);
    else
        chi0 = sc.x0;
    Eigen::VectorXd ebar = Eigen::VectorXd(luT.solve(chi0)) - sc.xhat0;

    for (long k = 0; k <= steps; ++k) {
        const double t = k * sc.step;
        const Eigen::VectorXd delta = eval_disturbance(sc.disturbance, t);
        const Eigen::VectorXd err_orig = sc.nf.T * ebar;
        Eigen::VectorXd xhat_orig(n_o);
        xhat_orig.head(n_p) = x - err_orig.head(n_p);
        if (augmented) xhat_orig(n_p) = delta(0) - err_orig(n_p);

        Eigen::VectorXd u = Eigen::VectorXd::Zero(q);
        if (sc.control.feedback) {
            u = -sc.control.feedback->K * xhat_orig.head(n_p);
            if (augmented) u -= sc.control.feedback->h * xhat_orig(n_p);
        } else if (!sc.control.open_loop.empty()) {
            for (int i = 0; i < q; ++i) u(i) = sc.control.open_loop[i].eval(t);
        }

        tr.times.push_back(t);
        tr.x.push_back(x);
        tr.xhat_original.push_back(xhat_orig);
        tr.eta.push_back(err_orig.head(n_p));
        tr.y.push_back(sc.plant.C * x);
        if (augmented) tr.delta_hat.push_back(xhat_orig(n_p));
        if (k == steps) break;

        x += sc.step * Eigen::VectorXd(sc.plant.A * x + sc.plant.B * u +
                                       sc.plant.D * delta);
        for (int s = 0; s < substeps; ++s) {
            const double ts = t + s * hs;
            // the augmented error dynamics are driven by the rate of Delta
            const Eigen::VectorXd din = augmented
                                            ? eval_disturbance_rate(sc.disturbance, ts)
                                            : eval_disturbance(sc.disturbance, ts);
            const Eigen::VectorXd sigma = sc.observer.Cbar * ebar;
            ebar += hs * Eigen::VectorXd(sc.observer.Abar * ebar - sc.observer.Pi * sigma -
                                         nonlinear_injection(sigma, sc.observer) +
                                         sc.nf.Dbar * din);
        }
        if (!x.allFinite() || !ebar.allFinite() ||
            x.cwiseAbs().maxCoeff() > 1e12 || ebar.cwiseAbs().maxCoeff() > 1e12)
            throw DivergedError("simulate: state magnitude exceeded 1e12 at t = " +
                                std::to_string(t));
    }
    return tr;
}

LtiSystem augment_for_input_reconstruction(const LtiSystem& sys, double ddot_bound,
                                           RankTolerance tol) {
    sys.validate(tol);
    if (sys.m() != 1)
        throw UnsupportedError(
            "augment_for_input_reconstruction: only a scalar unknown input is supported");
    if (sys.has_feedthrough())
        throw DimensionError("augment_for_input_reconstruction: eliminate feedthrough first");
    const int n = sys.n(), p = sys.p(), q = sys.q();

    LtiSystem aug;
    aug.A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.A.topLeftCorner(n, n) = sys.A;
    aug.A.topRightCorner(n, 1) = sys.D;
    aug.B = Eigen::MatrixXd::Zero(n + 1, q);
    aug.B.topRows(n) = sys.B;
    aug.D = Eigen::VectorXd::Unit(n + 1, n);
    aug.C = Eigen::MatrixXd::Zero(p, n + 1);
    aug.C.leftCols(n) = sys.C;
    aug.bounds = Eigen::VectorXd::Constant(1, ddot_bound);

    const auto so = is_strongly_observable(aug, tol);
    if (!so)
        throw NotStronglyObservableError(
            "augment_for_input_reconstruction: augmented system is not strongly observable");
    return aug;
}

Trace closed_loop_simulate(const Scenario& sc) {
    if (!sc.control.feedback)
        throw DimensionError("closed_loop_simulate: feedback specification required");
    const auto& fb = *sc.control.feedback;
    if (fb.h.cwiseAbs().maxCoeff() > 0.0) {
        const double mismatch = (sc.plant.D - sc.plant.B * fb.h).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, sc.plant.D.cwiseAbs().maxCoeff());
        if (mismatch > 1e-8 * scale)
            throw DimensionError("closed_loop_simulate: D = B h does not hold; "
                                 "disturbance is not matched");
    }
    return simulate(sc);
}

Eigen::VectorXcd nominal_eigen_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     const Eigen::MatrixXd& K) {
    return Eigen::EigenSolver<Eigen::MatrixXd>(A - B * K, false).eigenvalues();
}

std::optional<double> settling_time(const Trace& tr, double tol, double window) {
    const int N = tr.samples();
    if (N == 0) return std::nullopt;
    auto ok = [&](int k) {
        for (Eigen::Index i = 0; i < tr.eta[k].size(); ++i)
            if (std::abs(tr.eta[k](i)) >= tol * std::max(1.0, std::abs(tr.x[k](i))))
                return false;
        return true;
    };
    int last_fail = -1;
    for (int k = 0; k < N; ++k)
        if (!ok(k)) last_fail = k;
    const int start = last_fail + 1;
    if (start >= N) return std::nullopt;
    if (tr.times.back() - tr.times[start] < window) return std::nullopt;
    return tr.times[start];
}

}  // namespace uiobs
