"""Multi-prototype word embeddings with automatic sense allocation.

Trains one input vector per word sense online, sharing a hierarchical
softmax output layer, with the number of senses per word governed by a
truncated stick-breaking prior.  See the README for the CLI and the
acceptance experiments.
"""

from .corpus import (
    EmptyVocabularyError,
    TrainingPair,
    Vocabulary,
    build_vocabulary,
    iter_training_pairs,
    make_pseudoword_corpus,
    read_tokens,
)
from .huffman import HuffmanCode, build_huffman
from .hsoftmax import grad_log_p_word, log_p_word
from .model import (
    SenseModel,
    expected_log_pi,
    init_model,
    prior_sense_probs,
    sense_count,
)
from .predict import (
    avg_sim_c,
    disambiguate,
    max_sim_c,
    nearest_context,
    nearest_neighbors,
    predictive_loglik,
)
from .serialize import ModelFormatError, load_model, save_model
from .train import (
    TrainingConfig,
    TrainingDivergedError,
    global_step,
    local_elbo,
    local_step,
    schedule_rate,
    train,
)
from .wsi import (
    WsiDataset,
    WsiInstance,
    ari,
    evaluate_wsi,
    load_wsi_dataset,
    paired_fscore,
    v_measure,
)

__version__ = "0.1.0"
