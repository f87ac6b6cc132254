#ifndef MCCA_MCCA_HPP
#define MCCA_MCCA_HPP

#include "mcca/archive.hpp"
#include "mcca/cca.hpp"
#include "mcca/clustering.hpp"
#include "mcca/covariance.hpp"
#include "mcca/dataset.hpp"
#include "mcca/error.hpp"
#include "mcca/eval.hpp"
#include "mcca/matrix_io.hpp"
#include "mcca/mixture.hpp"
#include "mcca/numerics.hpp"
#include "mcca/random.hpp"
#include "mcca/synth.hpp"

#endif  // MCCA_MCCA_HPP
