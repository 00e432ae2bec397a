#include "fibrow/errors.hpp"

namespace fibrow {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::degenerate_projection: return "DegenerateProjection";
    case Errc::out_of_domain: return "OutOfDomain";
    case Errc::root_out_of_domain: return "RootOutOfDomain";
    case Errc::empty_region: return "EmptyRegion";
    case Errc::all_samples_behind_camera: return "AllSamplesBehindCamera";
    case Errc::too_short: return "TooShort";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::k_too_large: return "KTooLarge";
    case Errc::empty_set: return "EmptySet";
    case Errc::empty_roots: return "EmptyRoots";
    case Errc::both_empty: return "BothEmpty";
    case Errc::not_watertight: return "NotWatertight";
    case Errc::missing_root: return "MissingRoot";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::io_failure: return "IoFailure";
    case Errc::magic_mismatch: return "MagicMismatch";
    case Errc::truncated_payload: return "TruncatedPayload";
    case Errc::count_mismatch: return "CountMismatch";
    case Errc::non_finite: return "NonFinite";
    case Errc::schema_error: return "SchemaError";
    case Errc::unsupported_directive: return "UnsupportedDirective";
    case Errc::index_out_of_range: return "IndexOutOfRange";
  }
  return "Unknown";
}

}  // namespace fibrow
