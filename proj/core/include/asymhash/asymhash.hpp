#pragma once

#include "asymhash/baseline.hpp"
#include "asymhash/bitcode.hpp"
#include "asymhash/datagen.hpp"
#include "asymhash/eval.hpp"
#include "asymhash/io.hpp"
#include "asymhash/loss.hpp"
#include "asymhash/retrieval.hpp"
#include "asymhash/train.hpp"
