"""Referential-game corpora, NPMI collocation analysis, and lexicon induction.

The pipeline: generate spatial-reference game episodes, mark them with a
synthetic (or externally trained) sender, score message parts against
observation contexts with normalized pointwise mutual information,
extract a typed dictionary, and validate that dictionary by querying a
receiver with messages built from it.
"""

from .analysis import (
    AnalysisResult,
    MessageAnalyzer,
    ScoredAssociation,
    analyze,
    pmi_c_count,
    pmi_c_enumerate,
    pmi_c_integer_score,
    pmi_c_prune,
    pmi_c_referent_count,
    pmi_c_referent_score,
    pmi_nc_count,
    pmi_nc_score,
)
from .collocation import (
    CountTable,
    estimate_probability,
    integer_prior,
    kind_prior,
    npmi,
)
from .corpus import (
    Corpus,
    EnvConfig,
    EpisodeRecord,
    audit_overlap,
    generate_split,
    make_episode,
    read_jsonl,
    write_jsonl,
)
from .env import (
    CandidateSet,
    Observation,
    ObservationKind,
    Sequence,
    build_candidates,
    classify_observation,
    extract_window,
    generate_sequence,
    relative_distance,
)
from .errors import ConfigError, CoverageError, ParseError, ValidationError
from .hypotheses import (
    EvalSpec,
    FilePredictionsReceiver,
    GridResult,
    NullReceiver,
    OracleReceiver,
    RandomReceiver,
    evaluate,
    gen_eval_dataset,
    grid_search,
    report,
)
from .lexicon import (
    Dictionary,
    DictionaryEntry,
    DictionaryExtractor,
    extract_dictionary,
    render_dictionary,
    summarize_emergence,
)
from .synthlang import (
    LexEntry,
    LexiconSpec,
    encode,
    make_comp_lexicon,
    make_nc_lexicon,
    mark_corpus,
    oracle_decode,
)

__version__ = "0.1.0"
