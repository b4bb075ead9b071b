#pragma once

#include <filesystem>

#include "json.hpp"

#include "vpen/instances.hpp"

namespace vpen {

/**
 * JSON instance documents.
 *
 * Common fields: "family" ("nlp" | "sdp" | "control"), "name", optional
 * "note", optional "reference" {"x": [...], "f": number, "tol": number},
 * optional "exact_tau" (dual coordinates; packed upper triangle for sdp).
 *
 * nlp:     "dim", "box" {"lo", "hi"}, "objective", "inequalities",
 *          "equalities", optional "projection_hint". A quadratic is
 *          {"Q": [[...]], "q": [...], "r": number}.
 * sdp:     "dim", "box", "objective", "matrix_map" {"A0": [[...]], "A": [[[...]]...]}.
 * control: "control" {"horizon", "nodes", "x0", "xT", "u_lo", "u_hi",
 *          "weight", "state_bound", "bound_until"}.
 */
nlohmann::json serialize_instance(const InstanceSpec& spec);

/// Throws ParseError carrying the JSON pointer of the offending field.
InstanceSpec deserialize_instance(const nlohmann::json& doc);

InstanceSpec load_instance_file(const std::filesystem::path& path);

}  // namespace vpen
