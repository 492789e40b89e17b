#pragma once

#include <krylovlab/errors.hpp>
#include <krylovlab/linalg.hpp>
#include <krylovlab/operator_model.hpp>
#include <krylovlab/krylov.hpp>
#include <krylovlab/solvability.hpp>
#include <krylovlab/spectral_projection.hpp>
#include <krylovlab/measure_iso.hpp>
#include <krylovlab/io.hpp>
#include <krylovlab/harness.hpp>
