#pragma once

#include "swirl/api_embed.hpp"
#include "swirl/classify/kmeans.hpp"
#include "swirl/classify/logreg.hpp"
#include "swirl/classify/pipeline.hpp"
#include "swirl/classify/shallow_nn.hpp"
#include "swirl/classify/spectral.hpp"
#include "swirl/classify/transduce.hpp"
#include "swirl/embedstore.hpp"
#include "swirl/error.hpp"
#include "swirl/eval.hpp"
#include "swirl/io.hpp"
#include "swirl/manifest.hpp"
#include "swirl/pairdata.hpp"
#include "swirl/plot.hpp"
#include "swirl/reduce/knn.hpp"
#include "swirl/reduce/laplacian.hpp"
#include "swirl/reduce/pca.hpp"
#include "swirl/reduce/projection.hpp"
#include "swirl/reduce/tsne.hpp"
#include "swirl/reduce/umap.hpp"
#include "swirl/rng.hpp"
#include "swirl/tables.hpp"
#include "swirl/types.hpp"
#include "swirl/vectorize.hpp"
