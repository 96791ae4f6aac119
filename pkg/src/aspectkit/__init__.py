"""Unsupervised aspect extraction with kernel-based contrastive attention.

The pipeline: extract frequent nouns from an in-domain corpus as aspect
candidates, weight each sentence's tokens by their summed RBF-kernel
similarity to the candidate vectors, and label the weighted sentence summary
with the nearest label embedding by cosine.
"""

__version__ = "0.1.0"

from .attention import (
    AttentionConfig,
    AttentionResult,
    contrastive_attention,
    mean_summary,
    rbf,
    softmax_attention,
    summarize,
)
from .candidates import (
    CandidateSet,
    adj_noun_candidates,
    read_candidates,
    top_n_nouns,
    top_n_tokens,
)
from .corpus import (
    Corpus,
    Sentence,
    Token,
    Upos,
    parse_conllu,
    parse_plain,
    prepare_eval_set,
    write_conllu,
)
from .embeddings import VectorStore, load_word2vec_text, save_word2vec_text
from .errors import (
    AspectKitError,
    EmptyDatasetError,
    NoCandidatesError,
    OOVError,
    ParseError,
    VectorFormatError,
)
from .evaluation import (
    EvaluationReport,
    GridConfig,
    PipelineConfig,
    curve_tsv,
    evaluate,
    grid_search,
    learning_curve,
)
from .labeler import (
    DEFAULT_LABELS,
    LabelDefinition,
    LabeledResult,
    LabelMatrix,
    assign_label,
    build_label_vectors,
    label_corpus,
    label_sentence,
)
from .sgns import SkipGramTrainer, TrainerConfig, train
