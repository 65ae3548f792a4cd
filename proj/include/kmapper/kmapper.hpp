#pragma once

#include "kmapper/error.hpp"
#include "kmapper/dataset.hpp"
#include "kmapper/relation.hpp"
#include "kmapper/scatter.hpp"
#include "kmapper/fuzzy.hpp"
#include "kmapper/kmap.hpp"
#include "kmapper/fcm.hpp"
#include "kmapper/analysis.hpp"
#include "kmapper/synth.hpp"
