#pragma once

#include "forgery/classify.hpp"
#include "forgery/codec.hpp"
#include "forgery/dataset.hpp"
#include "forgery/ela.hpp"
#include "forgery/error.hpp"
#include "forgery/eval.hpp"
#include "forgery/experiment.hpp"
#include "forgery/features.hpp"
#include "forgery/imaging.hpp"
#include "forgery/localize.hpp"
#include "forgery/model_io.hpp"
#include "forgery/pipeline.hpp"
#include "forgery/synth.hpp"
