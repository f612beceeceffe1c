#ifndef NLI_NLI_HPP
#define NLI_NLI_HPP

#include "nli/conllu.hpp"
#include "nli/corpus.hpp"
#include "nli/dataset_io.hpp"
#include "nli/error.hpp"
#include "nli/evaluate.hpp"
#include "nli/explain.hpp"
#include "nli/features.hpp"
#include "nli/learn.hpp"
#include "nli/model_io.hpp"
#include "nli/platt.hpp"
#include "nli/stats.hpp"
#include "nli/svm.hpp"
#include "nli/synthetic.hpp"
#include "nli/util.hpp"
#include "nli/vectorize.hpp"

#endif  // NLI_NLI_HPP
