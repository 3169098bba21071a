"""GRU referential-game agents exchanging corpora with emlang over JSONL."""

from .data import GameConfig, read_records, to_tensors, write_predictions, write_records
from .jobs import evaluate_corpus, export_corpus, serve_receiver, sweep_lengths
from .models import Receiver, Sender, gumbel_softmax
from .train import DivergenceError, TrainConfig, TrainResult, load_checkpoint, train

__version__ = "0.1.0"
