#pragma once

#include "orlicz/errors.hpp"
#include "orlicz/roots.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/sequence.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/conjugate.hpp"
#include "orlicz/diagnostics.hpp"
#include "orlicz/extremal.hpp"
#include "orlicz/embedding.hpp"
#include "orlicz/ordinal.hpp"
#include "orlicz/nonembedding.hpp"
