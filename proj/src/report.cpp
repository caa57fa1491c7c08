#include "ivd/report.hpp"

#include <cmath>
#include <cstdio>

namespace ivd {

double round_for_report(double v) {
    if (!std::isfinite(v)) return v;
    if (v == 0.0) return 0.0;
    // 12 significant digits through a round trip, keeping reports byte-stable
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace {

using json = nlohmann::ordered_json;

json num(double v) { return round_for_report(v); }

json order_diag(const OrderDiagnostic& od) {
    json j;
    j["order"] = od.order;
    switch (od.kind) {
        case OrderDiagnostic::Kind::FiniteLimit:
            j["kind"] = "finite-limit";
            j["limit"] = num(od.limit);
            break;
        case OrderDiagnostic::Kind::PowerBlowup:
            j["kind"] = "power-blowup";
            j["exponent"] = num(od.exponent);
            break;
        default:
            j["kind"] = "inconclusive";
            break;
    }
    j["r2"] = num(od.r2);
    j["points"] = od.points;
    j["window"] = {num(od.window_lo), num(od.window_hi)};
    if (!od.note.empty()) j["note"] = od.note;
    return j;
}

}  // namespace

nlohmann::ordered_json to_json(const SmoothnessDiagnostics& diag) {
    json j;
    j["reached"] = num(diag.reached);
    j["window_clamped"] = diag.window_clamped;
    if (!diag.note.empty()) j["note"] = diag.note;
    json arr = json::array();
    for (const auto& od : diag.orders) arr.push_back(order_diag(od));
    j["orders"] = arr;
    return j;
}

nlohmann::ordered_json to_json(const ProductResult& r) {
    json j;
    switch (r.status) {
        case ProductStatus::Converged: j["status"] = "converged"; break;
        case ProductStatus::Diverged: j["status"] = "diverged"; break;
        default: j["status"] = "undetermined"; break;
    }
    j["value"] = num(r.value);
    j["log_value"] = num(r.log_value);
    j["terms_used"] = r.terms_used;
    j["tail_bound"] = num(r.tail_bound);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

nlohmann::ordered_json to_json(const ConjugacyReport& rep) {
    json j;
    j["verdict"] = verdict_str(rep.verdict);
    if (!rep.first_failure.empty()) j["first_failure"] = rep.first_failure;

    json conds = json::array();
    for (const auto& c : rep.conditions) {
        json cj;
        cj["name"] = c.name;
        cj["status"] = status_str(c.status);
        cj["evidence"] = c.evidence;
        conds.push_back(cj);
    }
    j["conditions"] = conds;

    json gaps = json::array();
    for (const auto& gp : rep.gaps) {
        json gj;
        gj["interval"] = {num(gp.f_lo), num(gp.f_hi)};
        gj["target_interval"] = {num(gp.g_lo), num(gp.g_hi)};
        gj["class"] = gp.cls;
        gj["p"] = status_str(gp.p_status);
        gj["e"] = status_str(gp.e_status);
        if (gp.lambda) gj["lambda"] = num(*gp.lambda);
        if (gp.mu) gj["mu"] = num(*gp.mu);
        if (gp.residual) gj["residual"] = num(*gp.residual);
        if (gp.agreement) gj["two_sided_agreement"] = num(*gp.agreement);
        if (!gp.smoothness.empty()) {
            json arr = json::array();
            for (const auto& od : gp.smoothness) arr.push_back(order_diag(od));
            gj["smoothness"] = arr;
        }
        if (!gp.note.empty()) gj["note"] = gp.note;
        gaps.push_back(gj);
    }
    j["gaps"] = gaps;

    json fps = json::array();
    for (const auto& fp : rep.fixed_points) {
        json fj;
        fj["x"] = num(fp.x_f);
        fj["x_target"] = num(fp.x_g);
        fj["multiplier_f"] = num(fp.mult_f);
        fj["multiplier_g"] = num(fp.mult_g);
        fj["jet_class"] = fp.jet_class_f + " / " + fp.jet_class_g;
        fj["match"] = status_str(fp.t_status);
        if (fp.m1_status) fj["m1"] = status_str(*fp.m1_status);
        if (!fp.note.empty()) fj["note"] = fp.note;
        fps.push_back(fj);
    }
    j["fixed_points"] = fps;
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    j["seed"] = rep.seed;
    return j;
}

std::string format_report(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace ivd
