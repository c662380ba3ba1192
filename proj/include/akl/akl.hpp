#ifndef AKL_AKL_HPP
#define AKL_AKL_HPP

#include "akl/adaptive.hpp"
#include "akl/harness.hpp"
#include "akl/io.hpp"
#include "akl/kernels.hpp"
#include "akl/modelsel.hpp"
#include "akl/nadaraya.hpp"
#include "akl/quadrature.hpp"
#include "akl/ridge.hpp"

#endif
