"""Training objective: dual cycle-consistency losses, the normal-length penalty,
the two shared adversarial losses, and their weighted joint combination.

Sign convention: every value returned here is minimized. Discriminator losses
are the negated log-likelihood objective, so "maximizing" the adversarial game
means stepping the discriminators on d_loss and the generators on g_loss.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

import torch

from .errors import NumericError

PROB_EPS = 1e-7


@dataclass
class LossWeights:
    w_cyc: float = 10.0
    w_norm: float = 1.0
    w_adv: float = 1.0
    smooth_l1_beta: float = 0.1

    def __post_init__(self):
        for name in ("w_cyc", "w_norm", "w_adv"):
            v = getattr(self, name)
            if not (v >= 0.0 and v == v):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if not (self.smooth_l1_beta > 0.0):
            raise ValueError(f"smooth_l1_beta must be > 0, got {self.smooth_l1_beta}")


@dataclass
class LossReport:
    """Per-step scalar values of every objective term; one JSON line per step."""

    step: int = 0
    l_ren: float = 0.0
    l_dec: float = 0.0
    l_norm: float = 0.0
    l_adv_I: float = 0.0
    l_adv_M: float = 0.0
    d_loss_I: float = 0.0
    d_loss_M: float = 0.0
    total_G: float = 0.0
    total_D: float = 0.0

    def to_json_line(self) -> str:
        return json.dumps({f.name: getattr(self, f.name) for f in fields(self)},
                          sort_keys=True)

    @staticmethod
    def from_json_line(line: str) -> "LossReport":
        return LossReport(**json.loads(line))


def ensure_finite(name: str, value: torch.Tensor) -> torch.Tensor:
    if not torch.isfinite(value).all():
        raise NumericError(f"non-finite loss term: {name}")
    return value


def smooth_l1(pred: torch.Tensor, target: torch.Tensor, beta: float) -> torch.Tensor:
    """Mean smooth-L1: 0.5 x^2 / beta for |x| < beta, else |x| - 0.5 beta."""
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {tuple(pred.shape)} vs {tuple(target.shape)}")
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    diff = (pred - target).abs()
    return torch.where(diff < beta, 0.5 * diff.square() / beta, diff - 0.5 * beta).mean()


def rendering_cycle_loss(renderer, decomposer, m_s: torch.Tensor,
                         beta: float = 0.1) -> torch.Tensor:
    """Smooth-L1 between input intrinsics and their reconstruction through the
    rendered image: || H(R(M)) - M ||."""
    return smooth_l1(decomposer(renderer(m_s)), m_s, beta)


def decomposition_cycle_loss(renderer, decomposer, i_r: torch.Tensor,
                             use_smooth_l1: bool = False, beta: float = 0.1) -> torch.Tensor:
    """Mean absolute error between a real image and its reconstruction through
    the predicted intrinsics: || R(H(I)) - I ||_1 (smooth-L1 behind a flag)."""
    recon = renderer(decomposer(i_r))
    if use_smooth_l1:
        return smooth_l1(recon, i_r, beta)
    return (recon - i_r).abs().mean()


def _unit_deviation(normals: torch.Tensor, mask: torch.Tensor | None) -> torch.Tensor:
    # normals (N, 3, H, W); mask (N, H, W) boolean or None for all pixels
    lengths = torch.linalg.vector_norm(normals, dim=1)
    dev = (1.0 - lengths).abs()
    if mask is None:
        return dev.mean()
    mask = mask.to(dev.dtype)
    return (dev * mask).sum() / mask.sum().clamp(min=1.0)


def norm_loss_from_normals(n_real: torch.Tensor, n_synth: torch.Tensor,
                           mask_real: torch.Tensor | None = None,
                           mask_synth: torch.Tensor | None = None) -> torch.Tensor:
    """norm_loss on already-predicted normal fields (lets the trainer reuse
    decompositions it computed for the cycle losses)."""
    return _unit_deviation(n_real, mask_real) + _unit_deviation(n_synth, mask_synth)


def norm_loss(normal_fn, i_r: torch.Tensor, rendered_s: torch.Tensor,
              mask_real: torch.Tensor | None = None,
              mask_synth: torch.Tensor | None = None) -> torch.Tensor:
    """Penalize non-unit predicted normals on real images and on rendered
    synthetics: |1 - ||n(I_r)||| + |1 - ||n(R(M_s))|||, each term averaged over
    its foreground pixels (all pixels if no mask is available)."""
    return norm_loss_from_normals(normal_fn(i_r), normal_fn(rendered_s),
                                  mask_real, mask_synth)


@dataclass
class AdversarialLoss:
    """Generator/discriminator values of one shared adversarial loss plus the
    individual discriminator terms (for ablation accounting)."""

    g_loss: torch.Tensor
    d_loss: torch.Tensor
    d_terms: list = field(default_factory=list)
    g_terms: list = field(default_factory=list)


def _term(score_maps: list[torch.Tensor], target_real: bool, mode: str) -> torch.Tensor:
    # one adversarial term, averaged over patches then over scales
    per_scale = []
    for logits in score_maps:
        if mode == "lsgan":
            target = 1.0 if target_real else 0.0
            per_scale.append((logits - target).square().mean())
        else:
            p = torch.sigmoid(logits).clamp(PROB_EPS, 1.0 - PROB_EPS)
            per_scale.append(-(torch.log(p) if target_real else torch.log(1.0 - p)).mean())
    return sum(per_scale) / len(per_scale)


def _shared_adv_loss(disc, real: torch.Tensor, fake_cross: torch.Tensor,
                     fake_recon: torch.Tensor | None, mode: str) -> AdversarialLoss:
    if fake_cross.shape != real.shape or (fake_recon is not None
                                          and fake_recon.shape != real.shape):
        raise ValueError("real/fake shapes disagree")
    fakes = [fake_cross] + ([fake_recon] if fake_recon is not None else [])
    d_terms = [_term(disc(real), True, mode)]
    d_terms += [_term(disc(f.detach()), False, mode) for f in fakes]
    g_terms = [_term(disc(f), True, mode) for f in fakes]
    return AdversarialLoss(g_loss=sum(g_terms), d_loss=sum(d_terms),
                           d_terms=d_terms, g_terms=g_terms)


def shared_adv_image_loss(disc_image, i_r, i_hat_s, i_hat_r=None,
                          mode: str = "nonsaturating") -> AdversarialLoss:
    """Image-side shared adversarial loss: the discriminator sees real images
    against BOTH the cross-domain render R(M_s) and the cycle reconstruction
    R(H(I_r)). Pass i_hat_r=None for the separate-discriminator ablation."""
    return _shared_adv_loss(disc_image, i_r, i_hat_s, i_hat_r, mode)


def shared_adv_intrinsic_loss(disc_intrinsics, m_s, m_hat_r, m_hat_s=None,
                              mode: str = "nonsaturating") -> AdversarialLoss:
    """Intrinsic-side shared adversarial loss: synthetic stacks are real; both
    H(I_r) and the cycle reconstruction H(R(M_s)) are fakes. Pass m_hat_s=None
    for the separate-discriminator ablation."""
    return _shared_adv_loss(disc_intrinsics, m_s, m_hat_r, m_hat_s, mode)


def joint_objective(report: LossReport, weights: LossWeights) -> tuple[float, float]:
    """Weighted totals: w_cyc (l_ren + l_dec) + w_norm l_norm + w_adv (adv_I + adv_M)
    for the generators, and the plain sum of discriminator losses."""
    total_g = (weights.w_cyc * (report.l_ren + report.l_dec)
               + weights.w_norm * report.l_norm
               + weights.w_adv * (report.l_adv_I + report.l_adv_M))
    total_d = report.d_loss_I + report.d_loss_M
    return total_g, total_d
