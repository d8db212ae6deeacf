#pragma once

namespace wasteplan {

// Several published formulas in the source cost model are internally
// inconsistent (see payt.hpp). `consistent` applies the corrected forms;
// `paper_literal` reproduces the printed forms verbatim so the two can be
// compared side by side.
enum class formula_mode {
  consistent,
  paper_literal,
};

}  // namespace wasteplan
