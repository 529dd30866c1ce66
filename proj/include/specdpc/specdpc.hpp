#pragma once

#include "specdpc/complex_matrix.hpp"
#include "specdpc/corpus.hpp"
#include "specdpc/eigen_field.hpp"
#include "specdpc/error.hpp"
#include "specdpc/hermitian.hpp"
#include "specdpc/lowrank.hpp"
#include "specdpc/regularity.hpp"
#include "specdpc/spectral_model.hpp"
#include "specdpc/timedomain.hpp"
#include "specdpc/version.hpp"
