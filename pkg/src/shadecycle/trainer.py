"""Alternating optimization of the joint objective: one discriminator update then
one generator update per step, with JSONL loss logging, periodic evaluation,
image grids and resumable checkpoints."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import torch

from .checkpointing import load_checkpoint, save_checkpoint
from .config import AblationConfig, TrainConfig, config_hash, reproducibility_hash
from .data.manifest import DatasetManifest, draw_unpaired_indices, load_manifest
from .errors import ConfigError, DataError
from .evaluation import RandomConvFeatures, evaluate_networks
from .grids import image_to_tile, save_grid, stack_to_tiles
from .losses import (LossReport, ensure_finite, joint_objective, norm_loss_from_normals,
                     shared_adv_image_loss, shared_adv_intrinsic_loss, smooth_l1)
from .networks import ablate_inputs, build_networks

EVAL_EXTRACTOR_DIM = 32
EVAL_EXTRACTOR_SEED = 7


class CorpusCache:
    """Preloads a manifest into compact quantized arrays so batch assembly
    never touches the disk; conversions reproduce decode_intrinsics exactly."""

    def __init__(self, manifest: DatasetManifest):
        self.manifest = manifest
        self.stacks, self.masks, self.reals = [], [], []
        for rec in manifest.by_kind("intrinsic"):
            m = manifest.load_intrinsics(rec)
            self.stacks.append(m.to_network().astype(np.float32))
            self.masks.append(m.foreground_mask)
        for rec in manifest.by_kind("real"):
            img = manifest.load_real(rec)
            self.reals.append(np.moveaxis(img.pixels, -1, 0).astype(np.float32))

    def sample_batch(self, batch_size: int, rng: np.random.Generator):
        idx_m, idx_r = draw_unpaired_indices(self.manifest, batch_size, rng)
        m_s = torch.from_numpy(np.stack([self.stacks[i] for i in idx_m]))
        masks = torch.from_numpy(np.stack([self.masks[i] for i in idx_m]))
        i_r = torch.from_numpy(np.stack([self.reals[i] for i in idx_r]))
        return m_s, masks, i_r


@dataclass
class TrainerState:
    config: TrainConfig
    step: int
    renderer: torch.nn.Module
    decomposer: torch.nn.Module
    disc_image: torch.nn.Module
    disc_intrinsics: torch.nn.Module
    opt_g: torch.optim.Optimizer
    opt_d: torch.optim.Optimizer
    data_rng: np.random.Generator


def init_trainer(config: TrainConfig) -> TrainerState:
    torch.manual_seed(config.seed)
    renderer, decomposer, disc_image, disc_intrinsics = build_networks(config.network)
    opt_g = torch.optim.Adam(
        list(renderer.parameters()) + list(decomposer.parameters()),
        lr=config.learning_rate, betas=(config.adam_beta1, config.adam_beta2))
    opt_d = torch.optim.Adam(
        list(disc_image.parameters()) + list(disc_intrinsics.parameters()),
        lr=config.learning_rate, betas=(config.adam_beta1, config.adam_beta2))
    data_rng = np.random.default_rng(config.seed)
    return TrainerState(config=config, step=0, renderer=renderer, decomposer=decomposer,
                        disc_image=disc_image, disc_intrinsics=disc_intrinsics,
                        opt_g=opt_g, opt_d=opt_d, data_rng=data_rng)


def compute_losses(state: TrainerState, batch):
    """All objective terms for one batch, before any parameter update.

    Ablations: without the shared discriminators the cycle reconstructions
    (R(H(I_r)) for D_I, H(R(M_s)) for D_M) are dropped from both adversarial
    sides; without the decomposition cycle, L_dec and D_I's reconstruction term
    are dropped (H(I_r) still feeds D_M and the norm loss).

    Returns (tensor-valued LossReport, image AdversarialLoss, intrinsic
    AdversarialLoss).
    """
    cfg = state.config
    abl = cfg.ablation
    wts = cfg.weights
    m_s, fg_masks, i_r = batch
    m_s = ablate_inputs(m_s, abl.drop_inputs)

    renderer, decomposer = state.renderer, state.decomposer

    i_hat_s = renderer(m_s)                      # rendered synthetic
    m_hat_s = decomposer(i_hat_s)                # rendering-cycle reconstruction
    m_hat_r = decomposer(i_r)                    # decomposed real
    use_dec_cycle = abl.decomposition_cycle
    i_hat_r = renderer(m_hat_r) if use_dec_cycle else None

    l_ren = ensure_finite("l_ren", smooth_l1(m_hat_s, m_s, wts.smooth_l1_beta))
    if use_dec_cycle:
        if cfg.dec_cycle_smooth_l1:
            l_dec = smooth_l1(i_hat_r, i_r, wts.smooth_l1_beta)
        else:
            l_dec = (i_hat_r - i_r).abs().mean()
        l_dec = ensure_finite("l_dec", l_dec)
    else:
        l_dec = torch.zeros(())

    l_norm = ensure_finite("l_norm", norm_loss_from_normals(
        m_hat_r[:, 3:6], m_hat_s[:, 3:6], mask_real=None, mask_synth=fg_masks))

    recon_image = i_hat_r if (abl.shared_discriminator and use_dec_cycle) else None
    adv_i = shared_adv_image_loss(state.disc_image, i_r, i_hat_s, recon_image,
                                  mode=cfg.gan_mode)
    recon_stack = m_hat_s if abl.shared_discriminator else None
    adv_m = shared_adv_intrinsic_loss(state.disc_intrinsics, m_s, m_hat_r, recon_stack,
                                      mode=cfg.gan_mode)
    ensure_finite("l_adv_I", adv_i.g_loss)
    ensure_finite("l_adv_M", adv_m.g_loss)
    ensure_finite("d_loss_I", adv_i.d_loss)
    ensure_finite("d_loss_M", adv_m.d_loss)

    tensor_report = LossReport(step=state.step, l_ren=l_ren, l_dec=l_dec, l_norm=l_norm,
                               l_adv_I=adv_i.g_loss, l_adv_M=adv_m.g_loss,
                               d_loss_I=adv_i.d_loss, d_loss_M=adv_m.d_loss)
    return tensor_report, adv_i, adv_m


def _current_lr(config: TrainConfig, step: int) -> float:
    """Optional linear decay to zero over the second half of training; a pure
    function of the step so checkpoint resume stays exact."""
    if not config.lr_decay:
        return config.learning_rate
    half = config.max_steps / 2
    frac = 1.0 - max(0.0, step - half) / (config.max_steps - half + 1)
    return config.learning_rate * frac


def train_step(state: TrainerState, batch) -> tuple[TrainerState, LossReport]:
    """One discriminator update followed by one generator update."""
    lr = _current_lr(state.config, state.step)
    for opt in (state.opt_g, state.opt_d):
        for group in opt.param_groups:
            group["lr"] = lr
    tensor_report, adv_i, adv_m = compute_losses(state, batch)
    l_ren, l_dec, l_norm = tensor_report.l_ren, tensor_report.l_dec, tensor_report.l_norm
    total_g, total_d = joint_objective(tensor_report, state.config.weights)

    # both gradients are taken at the pre-update point; the generator backward
    # runs first because stepping the discriminators in place would invalidate
    # the weights saved in the generator's adversarial graph. The D backward
    # afterwards overwrites the spill the G backward left in the D grads, and
    # the parameter updates are applied discriminator-first.
    state.opt_g.zero_grad(set_to_none=True)
    total_g.backward()
    state.opt_d.zero_grad(set_to_none=True)
    total_d.backward()
    state.opt_d.step()
    state.opt_g.step()

    report = LossReport(step=state.step,
                        l_ren=l_ren.detach().item(), l_dec=l_dec.detach().item(),
                        l_norm=l_norm.detach().item(),
                        l_adv_I=adv_i.g_loss.detach().item(),
                        l_adv_M=adv_m.g_loss.detach().item(),
                        d_loss_I=adv_i.d_loss.detach().item(),
                        d_loss_M=adv_m.d_loss.detach().item(),
                        total_G=total_g.detach().item(), total_D=total_d.detach().item())
    state.step += 1
    return state, report


def _resume(state: TrainerState, ckpt_path) -> TrainerState:
    payload = load_checkpoint(ckpt_path)
    if reproducibility_hash(payload["config"]) != reproducibility_hash(state.config):
        raise ConfigError("checkpoint config does not match the requested config")
    state.renderer.load_state_dict(payload["networks"]["renderer"])
    state.decomposer.load_state_dict(payload["networks"]["decomposer"])
    state.disc_image.load_state_dict(payload["networks"]["disc_image"])
    state.disc_intrinsics.load_state_dict(payload["networks"]["disc_intrinsics"])
    if payload["optimizers"]["generator"] is not None:
        state.opt_g.load_state_dict(payload["optimizers"]["generator"])
    if payload["optimizers"]["discriminator"] is not None:
        state.opt_d.load_state_dict(payload["optimizers"]["discriminator"])
    torch.set_rng_state(payload["rng"]["torch"])
    if payload["rng"]["data"] is not None:
        state.data_rng.bit_generator.state = payload["rng"]["data"]
    state.step = payload["step"]
    return state


def _training_grid(state: TrainerState, batch, path: Path) -> None:
    m_s, _, _ = batch
    m_s = ablate_inputs(m_s, state.config.ablation.drop_inputs)
    with torch.no_grad():
        rendered = state.renderer(m_s)
        recon = state.decomposer(rendered)
    rows = []
    for k in range(min(4, m_s.shape[0])):
        row = stack_to_tiles(m_s[k].numpy())
        row.append(image_to_tile(rendered[k].numpy()))
        row.extend(stack_to_tiles(recon[k].numpy()))
        rows.append(row)
    save_grid(path, rows)


def fit(config: TrainConfig, data_dir, out_dir, resume=None, max_steps=None,
        quiet=True) -> tuple[Path, list]:
    """Run the training loop against a generated corpus directory.

    Writes ``train_log.jsonl`` (one header line, then one LossReport per step),
    periodic image grids, and numbered + latest checkpoints into ``out_dir``.
    Returns (final checkpoint path, [(step, MetricReport), ...]).
    """
    data_dir = Path(data_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = load_manifest(data_dir)
    eval_manifest = None
    eval_dir = data_dir / "eval"
    if (eval_dir / "manifest.json").exists():
        eval_manifest = load_manifest(eval_dir)

    if tuple(manifest.resolution) != tuple(config.resolution):
        raise DataError(f"corpus resolution {manifest.resolution} != config "
                        f"{config.resolution}")

    cache = CorpusCache(manifest)
    state = init_trainer(config)
    if resume is not None:
        state = _resume(state, resume)

    extractor = None
    if eval_manifest is not None:
        # fid needs at least dim+1 samples per set; shrink for tiny eval splits
        dim = max(2, min(EVAL_EXTRACTOR_DIM, len(eval_manifest.by_kind("paired")) - 1))
        dim -= dim % 2
        extractor = RandomConvFeatures(dim=dim, seed=EVAL_EXTRACTOR_SEED)
    steps_target = max_steps if max_steps is not None else config.max_steps
    history = []
    log_path = out_dir / "train_log.jsonl"
    mode = "a" if resume is not None else "w"
    with open(log_path, mode) as log:
        if resume is None:
            log.write(json.dumps({"config_hash": config_hash(config),
                                  "tag": config.tag}) + "\n")
        t0 = time.time()
        while state.step < steps_target:
            batch = cache.sample_batch(config.batch_size, state.data_rng)
            state, report = train_step(state, batch)
            log.write(report.to_json_line() + "\n")
            done = state.step
            if not quiet and (done % 50 == 0 or done == steps_target):
                rate = done / max(time.time() - t0, 1e-9)
                print(f"step {done}/{steps_target} total_G={report.total_G:.4f} "
                      f"total_D={report.total_D:.4f} ({rate:.2f} it/s)", flush=True)
            if eval_manifest is not None and done % config.eval_every == 0:
                metrics = evaluate_networks(state.renderer, state.decomposer,
                                            eval_manifest, extractor)
                history.append((done, metrics))
                state.renderer.train()
                state.decomposer.train()
            if done % config.grid_every == 0:
                _training_grid(state, batch, out_dir / f"grid_{done:06d}.png")
            if done % config.checkpoint_every == 0 or done == steps_target:
                save_checkpoint(out_dir / f"ckpt_{done:06d}.pt", done, config,
                                state.renderer, state.decomposer, state.disc_image,
                                state.disc_intrinsics, state.opt_g, state.opt_d,
                                state.data_rng.bit_generator.state)
    final = save_checkpoint(out_dir / "ckpt_latest.pt", state.step, config,
                            state.renderer, state.decomposer, state.disc_image,
                            state.disc_intrinsics, state.opt_g, state.opt_d,
                            state.data_rng.bit_generator.state)
    return final, history


def ablation_grid(base: TrainConfig) -> list[TrainConfig]:
    """The six benchmark configurations: full model, separate discriminators,
    rendering cycle only, and the three input ablations. Configs differ from
    the base only in their ablation fields."""
    variants = [
        AblationConfig(),
        AblationConfig(shared_discriminator=False),
        AblationConfig(decomposition_cycle=False),
        AblationConfig(drop_inputs=("A",)),
        AblationConfig(drop_inputs=("N",)),
        AblationConfig(drop_inputs=("F",)),
    ]
    return [replace(base, ablation=a) for a in variants]
