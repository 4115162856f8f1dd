#pragma once

// Unique expansions of 1 in non-integer bases: words and digit sequences,
// certified base enclosures, the nested tree of relative entropy plateaus,
// subshift entropy, and the local/interval dimension formulas built on them.

#include "univoque/dimension.hpp"
#include "univoque/entropy.hpp"
#include "univoque/errors.hpp"
#include "univoque/expansion.hpp"
#include "univoque/numeric.hpp"
#include "univoque/phimap.hpp"
#include "univoque/plateaux.hpp"
#include "univoque/poly.hpp"
#include "univoque/words.hpp"
