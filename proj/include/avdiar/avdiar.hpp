#pragma once

#include "avdiar/errors.hpp"
#include "avdiar/evaluation.hpp"
#include "avdiar/features.hpp"
#include "avdiar/fusion.hpp"
#include "avdiar/image.hpp"
#include "avdiar/model.hpp"
#include "avdiar/patterns.hpp"
#include "avdiar/pipeline.hpp"
#include "avdiar/pmedian.hpp"
#include "avdiar/shot_analysis.hpp"
#include "avdiar/srt.hpp"
#include "avdiar/synth.hpp"
#include "avdiar/tables.hpp"
