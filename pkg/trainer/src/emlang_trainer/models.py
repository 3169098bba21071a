"""GRU sender and receiver for the spatial referential game.

The sender encodes its masked 5-value window with one GRU and generates a
3-symbol message with a second GRU through a Gumbel-Softmax channel.  The
receiver encodes the message, uses that encoding to initialize a GRU over
the full sequence, and scores each candidate by the inner product of its
embedding with the final hidden state.

Environmental values enter as scalars (never one-hot); each scalar is
expanded through a fixed sinusoidal feature bank before its GRU, which
makes value matching learnable within a small step budget while keeping
nearby values smoothly related.
"""
from __future__ import annotations

import math

import torch
import torch.nn.functional as F
from torch import nn

MESSAGE_LEN = 3


class ScalarEncoder(nn.Module):
    """Fixed sin/cos features of a scalar game value.

    Inputs are expected normalized by ``num_points`` (as produced by the
    data layer); the encoder rescales internally.  No learned parameters.
    """

    def __init__(self, num_points: int, n_freq: int | None = None):
        super().__init__()
        if n_freq is None:
            n_freq = max(8, min(32, num_points // 2))
        self.num_points = num_points
        self.n_freq = n_freq
        freqs = torch.arange(1, n_freq + 1, dtype=torch.float32)
        self.register_buffer("freqs", freqs * math.pi / (num_points + 1))

    @property
    def dim(self) -> int:
        return 2 * self.n_freq

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        angles = (x * self.num_points).unsqueeze(-1) * self.freqs
        return torch.cat([torch.sin(angles), torch.cos(angles)], dim=-1)


def gumbel_noise(shape, generator=None, dtype=torch.float32):
    u = torch.rand(shape, generator=generator, dtype=dtype)
    inner = (-torch.log(u.clamp_min(1e-20))).clamp_min(1e-20)
    return -torch.log(inner)


def gumbel_softmax(logits, temperature=1.0, hard=True, noise=None):
    """Reparametrized categorical sample.

    ``hard=True`` returns a straight-through one-hot (forward pass is
    discrete, gradients flow through the relaxed sample).  Supplying
    ``noise`` makes the draw a deterministic differentiable function of
    the logits, which the gradient tests rely on.
    """
    if noise is None:
        noise = gumbel_noise(logits.shape, dtype=logits.dtype)
    y = F.softmax((logits + noise) / temperature, dim=-1)
    if not hard:
        return y
    index = y.argmax(dim=-1, keepdim=True)
    y_hard = torch.zeros_like(y).scatter_(-1, index, 1.0)
    return y_hard + y - y.detach()


class Sender(nn.Module):
    def __init__(self, vocab_size: int, hidden_size: int = 64,
                 num_points: int = 60):
        super().__init__()
        self.vocab_size = vocab_size
        self.hidden_size = hidden_size
        self.scalar = ScalarEncoder(num_points)
        self.obs_encoder = nn.GRU(self.scalar.dim, hidden_size, batch_first=True)
        self.symbol_embed = nn.Linear(vocab_size, hidden_size, bias=False)
        self.start = nn.Parameter(torch.zeros(hidden_size))
        self.decoder = nn.GRUCell(hidden_size, hidden_size)
        self.to_logits = nn.Linear(hidden_size, vocab_size)

    def forward(self, obs, temperature=1.0, hard=True, noise=None):
        """obs: (B, 5) scalars -> (message one-hots (B, 3, V), logits)."""
        batch = obs.shape[0]
        _, h = self.obs_encoder(self.scalar(obs))
        state = h.squeeze(0)
        step_in = self.start.unsqueeze(0).expand(batch, -1)
        symbols = []
        logits_all = []
        for step in range(MESSAGE_LEN):
            state = self.decoder(step_in, state)
            logits = self.to_logits(state)
            step_noise = None if noise is None else noise[:, step]
            symbol = gumbel_softmax(logits, temperature, hard, step_noise)
            symbols.append(symbol)
            logits_all.append(logits)
            step_in = self.symbol_embed(symbol)
        return torch.stack(symbols, dim=1), torch.stack(logits_all, dim=1)

    @torch.no_grad()
    def decode(self, obs) -> torch.Tensor:
        """Deterministic argmax messages, (B, 3) long."""
        batch = obs.shape[0]
        _, h = self.obs_encoder(self.scalar(obs))
        state = h.squeeze(0)
        step_in = self.start.unsqueeze(0).expand(batch, -1)
        out = []
        for _ in range(MESSAGE_LEN):
            state = self.decoder(step_in, state)
            logits = self.to_logits(state)
            index = logits.argmax(dim=-1)
            out.append(index)
            one_hot = F.one_hot(index, self.vocab_size).to(logits.dtype)
            step_in = self.symbol_embed(one_hot)
        return torch.stack(out, dim=1)


class Receiver(nn.Module):
    """Message-conditioned sequence reader with an inner-product scorer.

    The message encoding both initializes the sequence GRU and rides along
    as a per-step input; with initialization alone its influence washes
    out over long sequences before training can latch onto it.
    """

    def __init__(self, vocab_size: int, hidden_size: int = 64,
                 num_points: int = 60):
        super().__init__()
        self.vocab_size = vocab_size
        self.hidden_size = hidden_size
        self.scalar = ScalarEncoder(num_points)
        self.message_encoder = nn.GRU(vocab_size, hidden_size, batch_first=True)
        self.sequence_encoder = nn.GRU(
            self.scalar.dim + hidden_size, hidden_size, batch_first=True
        )
        self.candidate_embed = nn.Linear(self.scalar.dim, hidden_size)

    def forward(self, message, seq, candidates):
        """message: (B, 3, V) simplex/one-hot; seq: (B, N); candidates:
        (B, k+1) -> logits over candidate positions (B, k+1)."""
        _, h = self.message_encoder(message)
        context = h.squeeze(0).unsqueeze(1).expand(-1, seq.shape[1], -1)
        steps = torch.cat([self.scalar(seq), context], dim=-1)
        _, h_seq = self.sequence_encoder(steps, h)
        state = h_seq.squeeze(0)
        cand = self.candidate_embed(self.scalar(candidates))
        return torch.einsum("bkh,bh->bk", cand, state)

    @torch.no_grad()
    def decode(self, message_indices, seq, candidates) -> torch.Tensor:
        """Hard messages (B, 3) long -> predicted candidate indices (B,)."""
        one_hot = F.one_hot(message_indices, self.vocab_size).to(seq.dtype)
        return self.forward(one_hot, seq, candidates).argmax(dim=-1)
