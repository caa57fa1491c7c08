#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ivd/linearize.hpp"
#include "ivd/series.hpp"
#include "ivd/solver.hpp"

namespace ivd {

enum class Verdict { Conjugate, NotConjugate, Undetermined };
std::string verdict_str(Verdict v);

struct ConditionStatus {
    std::string name;  // Sign, T, P, E, Shape, M1, M, F, Flow
    Status status = Status::Undetermined;
    std::string evidence;
};

struct GapReport {
    double f_lo = 0, f_hi = 0;
    double g_lo = 0, g_hi = 0;
    std::string cls;  // "S-"/"S+"
    Status p_status = Status::Undetermined;
    Status e_status = Status::Undetermined;
    std::optional<double> lambda;     // conjugation derivative at the forward end
    std::optional<double> mu;         // and at the backward end (compact gaps)
    std::optional<double> residual;
    std::optional<double> agreement;  // sup |Phi+ - Phi-| (compact gaps)
    std::vector<OrderDiagnostic> smoothness;
    std::string note;
};

struct FixedPointReport {
    double x_f = 0, x_g = 0;
    double mult_f = 1, mult_g = 1;
    std::string jet_class_f, jet_class_g;
    Status t_status = Status::Undetermined;
    std::optional<Status> m1_status;  // interior points only
    std::string note;
};

struct ConjugacyReport {
    Verdict verdict = Verdict::Undetermined;
    std::vector<ConditionStatus> conditions;
    std::vector<GapReport> gaps;
    std::vector<FixedPointReport> fixed_points;
    std::string first_failure;
    std::vector<std::string> notes;
    unsigned long long seed = 0;
};

struct ClassifyOptions {
    SolverOptions solver;
    double tol_match = 1e-7;   // numeric tolerance for invariant comparisons
    double tol_jet = 1e-9;     // snapping tolerance for jet coefficients
    int series_order = 12;
    int probe_order = 4;
    bool run_probe = true;
    bool run_shape = true;
    bool run_modulus = true;
    int shape_points = 160;
};

// Full pipeline for orientation-preserving pairs with finite declared fixed
// sets; orientation-reversing pairs are routed through the squared maps.
ConjugacyReport classify(const Diffeo& f, const Diffeo& g, const ClassifyOptions& opt = {});

// ------ building blocks (exposed for tests and the CLI) ------ //

struct JetConditionResult {
    Status status = Status::Undetermined;
    std::string class_f, class_g;
    double mult_f = 1, mult_g = 1;
    bool flat_flat = false;  // no jet obstruction at this truncation
    std::string note;
};
JetConditionResult jet_condition_T(const SmoothMap& f, double pf, const SmoothMap& g, double pg,
                                   const ClassifyOptions& opt = {});

// snapped exact series of the jet of a map at a point
FormalSeries series_at(const SmoothMap& f, double p, int order, double tol_jet);

struct CosetDescriptor {
    enum class Kind { Hyperbolic, Takens, Flat };
    Kind kind = Kind::Hyperbolic;
    double lambda = 1.0;     // observed conjugation derivative at the point
    double generator = 1.0;  // f'(p), generating the discrete option
    bool connected = false;  // Sergeraert-backed evidence of a connected centralizer
};
Status match_jets(const CosetDescriptor& left, const CosetDescriptor& right, double tol,
                  std::string* note = nullptr);

struct FlowabilityReport {
    bool not_flowable = false;  // shape pattern rules a flow out
    bool consistent = true;     // F_a constant forces unit end multipliers
    ShapePattern pattern;
    double mult_c = 1.0, mult_d = 1.0;
    std::string note;
};
FlowabilityReport flowability_check(const Diffeo& f, const Gap& gap,
                                    const ClassifyOptions& opt = {});

ConjugacyReport reduce_orientation_reversing(const Diffeo& f, const Diffeo& g,
                                             const ClassifyOptions& opt = {});

}  // namespace ivd
