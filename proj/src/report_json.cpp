#include "sleigh/report_json.hpp"

namespace sleigh {

void to_json(nlohmann::ordered_json& j, const Witness& w) {
  j = nlohmann::ordered_json{{"label", w.label}, {"values", w.values}};
}

void to_json(nlohmann::ordered_json& j, const VerificationReport& r) {
  j = nlohmann::ordered_json{{"name", r.name}, {"passed", r.passed}, {"margin", r.margin}};
  j["witness"] = r.witness ? nlohmann::ordered_json(*r.witness) : nlohmann::ordered_json(nullptr);
  j["detail"] = r.detail;
}

void to_json(nlohmann::ordered_json& j, const ConvergenceSummary& s) {
  j = nlohmann::ordered_json{{"initial_q_norm", s.initial_q_norm},
                             {"final_q_norm", s.final_q_norm},
                             {"decay_ratio", s.decay_ratio},
                             {"initial_H_d", s.initial_H_d},
                             {"final_H_d", s.final_H_d},
                             {"H_d_monotone", s.H_d_monotone},
                             {"audit_violations", s.audit_violations},
                             {"sup_wp_norm", s.sup_wp_norm},
                             {"level_set_bound", s.level_set_bound},
                             {"min_abs_w1", s.min_abs_w1},
                             {"final_time", s.final_time}};
}

void to_json(nlohmann::ordered_json& j, const IntegratorStats& s) {
  j = nlohmann::ordered_json{{"accepted_steps", s.accepted},
                             {"rejected_steps", s.rejected},
                             {"singular_rejections", s.singular_rejections},
                             {"smallest_step", s.smallest_step},
                             {"stopped_early", s.stopped_early}};
}

}  // namespace sleigh
