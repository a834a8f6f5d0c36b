/**
 * @file condition_json.hpp
 * @brief Shared JSON encoding of walking conditions (sidecars, synth specs,
 *        run configs).
 */

#pragma once

#include "json.hpp"
#include "trial.hpp"

namespace exotorq {

Condition condition_from_json(const nlohmann::json& j);
nlohmann::json condition_to_json(const Condition& c);

} // namespace exotorq
