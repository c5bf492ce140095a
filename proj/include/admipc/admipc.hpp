#ifndef ADMIPC_ADMIPC_HPP
#define ADMIPC_ADMIPC_HPP

#include "admipc/bench.hpp"
#include "admipc/errors.hpp"
#include "admipc/evaluate.hpp"
#include "admipc/io.hpp"
#include "admipc/louvain.hpp"
#include "admipc/netgen.hpp"
#include "admipc/rng.hpp"
#include "admipc/rpca.hpp"
#include "admipc/solver.hpp"
#include "admipc/specmat.hpp"
#include "admipc/spectral.hpp"

#endif  // ADMIPC_ADMIPC_HPP
