#ifndef GOURSAT_GOURSAT_HPP
#define GOURSAT_GOURSAT_HPP

#include "goursat/error.hpp"
#include "goursat/residual.hpp"
#include "goursat/expr.hpp"
#include "goursat/jets.hpp"
#include "goursat/web.hpp"
#include "goursat/families.hpp"
#include "goursat/sampling.hpp"
#include "goursat/classify.hpp"
#include "goursat/exterior.hpp"
#include "goursat/identities.hpp"
#include "goursat/config.hpp"
#include "goursat/run.hpp"
#include "goursat/selftest.hpp"

#endif  // GOURSAT_GOURSAT_HPP
