import math

import numpy as np
import pytest
import torch
import torch.nn as nn

from shadecycle.losses import (LossReport, LossWeights,
                               decomposition_cycle_loss, joint_objective, norm_loss,
                               rendering_cycle_loss, shared_adv_image_loss,
                               shared_adv_intrinsic_loss, smooth_l1, PROB_EPS)

@pytest.fixture(autouse=True)
def double_precision():
    prev = torch.get_default_dtype()
    torch.set_default_dtype(torch.float64)
    yield
    torch.set_default_dtype(prev)


# --- tiny differentiable stubs (double precision, 4x4-friendly) ---

class StubRenderer(nn.Module):
    def __init__(self, seed=0):
        super().__init__()
        torch.manual_seed(seed)
        self.conv = nn.Conv2d(9, 3, 3, padding=1)

    def forward(self, x):
        return torch.tanh(self.conv(x))


class StubDecomposer(nn.Module):
    def __init__(self, seed=1):
        super().__init__()
        torch.manual_seed(seed)
        self.conv = nn.Conv2d(3, 9, 3, padding=1)

    def forward(self, x):
        return self.conv(x)

    def normals(self, x):
        return self.conv(x)[:, 3:6]


class StubDisc(nn.Module):
    def __init__(self, in_ch, seed=2):
        super().__init__()
        torch.manual_seed(seed)
        self.conv = nn.Conv2d(in_ch, 1, 3, padding=1)

    def forward(self, x):
        return [self.conv(x), self.conv(x[..., ::2, ::2])]


def const_disc(logit):
    return lambda x: [torch.full((x.shape[0], 1, 2, 2), float(logit), dtype=x.dtype)]


def fd_gradient_check(loss_fn, module, n_probe=10, h=1e-6, rtol=1e-4, seed=0):
    """Central finite differences on random parameters vs autograd."""
    module.zero_grad()
    loss_fn().backward()
    params = [p for p in module.parameters() if p.grad is not None]
    rng = np.random.default_rng(seed)
    checked = 0
    while checked < n_probe:
        p = params[rng.integers(0, len(params))]
        flat = p.data.view(-1)
        idx = int(rng.integers(0, flat.numel()))
        orig = flat[idx].item()
        with torch.no_grad():
            flat[idx] = orig + h
            f_plus = loss_fn().item()
            flat[idx] = orig - h
            f_minus = loss_fn().item()
            flat[idx] = orig
        fd = (f_plus - f_minus) / (2 * h)
        an = p.grad.view(-1)[idx].item()
        assert abs(fd - an) <= rtol * max(1.0, abs(fd), abs(an)), (fd, an)
        checked += 1


# --- smooth_l1 ---

def test_smooth_l1_identity():
    x = torch.randn(3, 4, 4)
    assert smooth_l1(x, x, 0.5).item() == 0.0


def test_smooth_l1_boundary_and_linear():
    one = torch.tensor([1.0])
    zero = torch.tensor([0.0])
    assert smooth_l1(one, zero, 1.0).item() == pytest.approx(0.5)
    assert smooth_l1(torch.tensor([3.0]), zero, 1.0).item() == pytest.approx(2.5)


def test_smooth_l1_quadratic_branch():
    # |x| = 0.05 < beta=0.1 -> 0.5 * 0.0025 / 0.1 = 0.0125
    assert smooth_l1(torch.tensor([0.05]), torch.tensor([0.0]), 0.1).item() == pytest.approx(0.0125)


def test_smooth_l1_validation():
    with pytest.raises(ValueError):
        smooth_l1(torch.zeros(2), torch.zeros(3), 0.1)
    with pytest.raises(ValueError):
        smooth_l1(torch.zeros(2), torch.zeros(2), 0.0)


# --- cycle losses ---

def test_rendering_cycle_identity_stub():
    m = torch.randn(1, 9, 4, 4)
    loss = rendering_cycle_loss(lambda x: x[:, :3], lambda y: m, m, beta=1.0)
    assert loss.item() == 0.0


def test_rendering_cycle_constant_offset():
    m = torch.randn(1, 9, 4, 4)
    loss = rendering_cycle_loss(lambda x: x[:, :3], lambda y: m + 1.0, m, beta=1.0)
    assert loss.item() == pytest.approx(0.5)


def test_rendering_cycle_gradient_check():
    renderer = StubRenderer()
    decomposer = StubDecomposer()
    m = torch.randn(1, 9, 4, 4)
    fd_gradient_check(lambda: rendering_cycle_loss(renderer, decomposer, m, beta=0.1),
                      renderer)
    fd_gradient_check(lambda: rendering_cycle_loss(renderer, decomposer, m, beta=0.1),
                      decomposer)


def test_decomposition_cycle_identity_stub():
    i = torch.randn(1, 3, 4, 4)
    loss = decomposition_cycle_loss(lambda m: i, lambda x: torch.zeros(1, 9, 4, 4), i)
    assert loss.item() == 0.0


def test_decomposition_cycle_constant_offset():
    i = torch.randn(1, 3, 4, 4)
    loss = decomposition_cycle_loss(lambda m: i + 0.3, lambda x: torch.zeros(1, 9, 4, 4), i)
    assert loss.item() == pytest.approx(0.3)


def test_decomposition_cycle_gradient_check():
    renderer = StubRenderer(seed=3)
    decomposer = StubDecomposer(seed=4)
    i = torch.randn(1, 3, 4, 4)
    fd_gradient_check(lambda: decomposition_cycle_loss(renderer, decomposer, i), renderer)
    fd_gradient_check(lambda: decomposition_cycle_loss(renderer, decomposer, i), decomposer)


# --- norm loss ---

def unit_normal_fn(x):
    n = torch.ones(x.shape[0], 3, x.shape[2], x.shape[3], dtype=x.dtype)
    return n / math.sqrt(3.0)


def test_norm_loss_unit_field_is_zero():
    i = torch.randn(1, 3, 4, 4)
    r = torch.randn(1, 3, 4, 4)
    assert norm_loss(unit_normal_fn, i, r).item() == pytest.approx(0.0, abs=1e-12)


def test_norm_loss_zero_field():
    i = torch.randn(1, 3, 4, 4)
    r = torch.randn(1, 3, 4, 4)
    loss = norm_loss(lambda x: torch.zeros(1, 3, 4, 4), i, r)
    assert loss.item() == pytest.approx(2.0)


def test_norm_loss_double_length_field():
    i = torch.randn(1, 3, 4, 4)
    r = torch.randn(1, 3, 4, 4)
    loss = norm_loss(lambda x: 2.0 * unit_normal_fn(x), i, r)
    assert loss.item() == pytest.approx(2.0)


def test_norm_loss_respects_masks():
    i = torch.randn(1, 3, 4, 4)
    r = torch.randn(1, 3, 4, 4)
    mask = torch.zeros(1, 4, 4, dtype=torch.bool)
    mask[0, :2] = True

    def half_bad(x):
        n = unit_normal_fn(x).clone()
        n[:, :, 2:] = 0.0  # broken only outside the mask
        return n

    masked = norm_loss(half_bad, i, r, mask_real=mask, mask_synth=mask)
    assert masked.item() == pytest.approx(0.0, abs=1e-12)
    unmasked = norm_loss(half_bad, i, r)
    assert unmasked.item() == pytest.approx(1.0)  # half the pixels off by 1, twice


def test_norm_loss_gradient_check():
    decomposer = StubDecomposer(seed=5)
    renderer = StubRenderer(seed=6)
    i = torch.randn(1, 3, 4, 4)
    m = torch.randn(1, 9, 4, 4)
    fd_gradient_check(lambda: norm_loss(decomposer.normals, i, renderer(m)), decomposer)
    fd_gradient_check(lambda: norm_loss(decomposer.normals, i, renderer(m)), renderer)


# --- shared adversarial losses ---

def test_shared_adv_half_probability_value():
    real = torch.randn(1, 3, 4, 4)
    fake_s = torch.randn(1, 3, 4, 4)
    fake_r = torch.randn(1, 3, 4, 4)
    out = shared_adv_image_loss(const_disc(0.0), real, fake_s, fake_r)
    assert out.d_loss.item() == pytest.approx(-3 * math.log(0.5), rel=1e-9)
    assert out.g_loss.item() == pytest.approx(-2 * math.log(0.5), rel=1e-9)
    assert len(out.d_terms) == 3 and len(out.g_terms) == 2


def test_shared_adv_perfect_separation_limits():
    real = torch.full((1, 3, 4, 4), 1.0)
    fake = torch.full((1, 3, 4, 4), -1.0)
    disc = lambda x: [x.mean().reshape(1, 1, 1, 1) * 100.0]
    out = shared_adv_image_loss(disc, real, fake, fake.clone())
    assert out.d_loss.item() < 1e-5
    assert out.g_loss.item() == pytest.approx(-2 * math.log(PROB_EPS), rel=1e-6)


def test_shared_adv_term_accounting_matches_ablation():
    torch.manual_seed(7)
    disc = StubDisc(3)
    real, fake_s, fake_r = torch.randn(3, 1, 3, 8, 8)
    full = shared_adv_image_loss(disc, real, fake_s, fake_r)
    ablated = shared_adv_image_loss(disc, real, fake_s, None)
    assert len(full.d_terms) == 3 and len(ablated.d_terms) == 2
    excluded = full.d_terms[2].item()
    assert full.d_loss.item() - ablated.d_loss.item() == pytest.approx(excluded, abs=1e-9)


def test_shared_adv_intrinsic_mirrors_image_loss():
    # matched stubs that score the per-pixel channel mean identically
    def disc(x):
        return [x.mean(dim=1, keepdim=True) * 3.0]

    torch.manual_seed(8)
    base = torch.randn(1, 1, 4, 4)
    imgs = [base.repeat(1, 3, 1, 1) for _ in range(3)]
    stacks = [base.repeat(1, 9, 1, 1) for _ in range(3)]
    out_i = shared_adv_image_loss(disc, *imgs)
    out_m = shared_adv_intrinsic_loss(disc, *stacks)
    assert out_i.d_loss.item() == pytest.approx(out_m.d_loss.item(), rel=1e-12)
    assert out_i.g_loss.item() == pytest.approx(out_m.g_loss.item(), rel=1e-12)


def test_shared_adv_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        shared_adv_image_loss(const_disc(0.0), torch.randn(1, 3, 4, 4),
                              torch.randn(1, 3, 8, 8))


def test_shared_adv_generator_gradient_check():
    renderer = StubRenderer(seed=9)
    decomposer = StubDecomposer(seed=10)
    disc_i = StubDisc(3, seed=11)
    disc_m = StubDisc(9, seed=12)
    m = torch.randn(1, 9, 4, 4)
    i = torch.randn(1, 3, 4, 4)

    def g_image():
        return shared_adv_image_loss(disc_i, i, renderer(m),
                                     renderer(decomposer(i))).g_loss

    def g_intr():
        return shared_adv_intrinsic_loss(disc_m, m, decomposer(i),
                                         decomposer(renderer(m))).g_loss

    fd_gradient_check(g_image, renderer)
    fd_gradient_check(g_image, decomposer)
    fd_gradient_check(g_intr, decomposer)
    fd_gradient_check(g_intr, renderer)


def test_d_loss_gradient_does_not_reach_generators():
    renderer = StubRenderer(seed=13)
    disc = StubDisc(3, seed=14)
    m = torch.randn(1, 9, 4, 4)
    i = torch.randn(1, 3, 4, 4)
    out = shared_adv_image_loss(disc, i, renderer(m))
    renderer.zero_grad()
    out.d_loss.backward()
    assert all(p.grad is None or p.grad.abs().sum() == 0 for p in renderer.parameters())
    assert any(p.grad is not None and p.grad.abs().sum() > 0 for p in disc.parameters())


def test_lsgan_mode_values():
    real = torch.randn(1, 3, 4, 4)
    fake = torch.randn(1, 3, 4, 4)
    out = shared_adv_image_loss(const_disc(0.0), real, fake, fake.clone(), mode="lsgan")
    # logits are 0 everywhere: real term (0-1)^2 = 1, fake terms 0
    assert out.d_loss.item() == pytest.approx(1.0)
    assert out.g_loss.item() == pytest.approx(2.0)


# --- joint objective ---

def test_joint_objective_zeros():
    report = LossReport()
    total_g, total_d = joint_objective(report, LossWeights(1, 1, 1))
    assert total_g == 0.0 and total_d == 0.0


def test_joint_objective_unit_weights_sum():
    report = LossReport(l_ren=1, l_dec=2, l_norm=3, l_adv_I=4, l_adv_M=5,
                        d_loss_I=7, d_loss_M=9)
    total_g, total_d = joint_objective(report, LossWeights(1, 1, 1))
    assert total_g == pytest.approx(15.0)
    assert total_d == pytest.approx(16.0)


def test_joint_objective_without_adversary():
    report = LossReport(l_ren=1, l_dec=2, l_norm=3, l_adv_I=4, l_adv_M=5)
    total_g, _ = joint_objective(report, LossWeights(2, 1, 0))
    assert total_g == pytest.approx(2 * 3 + 3)


def test_loss_weights_validation():
    with pytest.raises(ValueError):
        LossWeights(w_cyc=-1)
    with pytest.raises(ValueError):
        LossWeights(smooth_l1_beta=0)


def test_loss_report_json_roundtrip():
    report = LossReport(step=3, l_ren=0.5, total_G=1.25)
    again = LossReport.from_json_line(report.to_json_line())
    assert again == report


def test_all_losses_nonnegative_and_finite():
    torch.manual_seed(15)
    renderer = StubRenderer(seed=16)
    decomposer = StubDecomposer(seed=17)
    disc = StubDisc(3, seed=18)
    for _ in range(20):
        m = torch.randn(1, 9, 4, 4)
        i = torch.randn(1, 3, 4, 4)
        values = [
            rendering_cycle_loss(renderer, decomposer, m, beta=0.1),
            decomposition_cycle_loss(renderer, decomposer, i),
            norm_loss(decomposer.normals, i, renderer(m)),
        ]
        adv = shared_adv_image_loss(disc, i, renderer(m), renderer(decomposer(i)))
        values += [adv.g_loss, adv.d_loss]
        for v in values:
            assert torch.isfinite(v).all() and v.item() >= 0.0
