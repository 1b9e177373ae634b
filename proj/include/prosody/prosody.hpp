#ifndef PROSODY_PROSODY_HPP
#define PROSODY_PROSODY_HPP

#include "prosody/coding.hpp"
#include "prosody/config.hpp"
#include "prosody/corpus.hpp"
#include "prosody/error.hpp"
#include "prosody/eval.hpp"
#include "prosody/features.hpp"
#include "prosody/labels.hpp"
#include "prosody/mlp.hpp"
#include "prosody/model_io.hpp"
#include "prosody/report.hpp"
#include "prosody/synthgen.hpp"

#endif  // PROSODY_PROSODY_HPP
