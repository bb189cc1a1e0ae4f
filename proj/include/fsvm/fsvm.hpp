#pragma once

// Umbrella header: the full training, selection, and evaluation pipeline.

#include "fsvm/dataset.hpp"
#include "fsvm/error.hpp"
#include "fsvm/eval.hpp"
#include "fsvm/fscore.hpp"
#include "fsvm/kernel.hpp"
#include "fsvm/model_io.hpp"
#include "fsvm/report.hpp"
#include "fsvm/svm.hpp"
