"""Network zoo: renderer R (intrinsics -> image), decomposer H (image -> intrinsics),
and the two multi-scale patch discriminators.

Channel convention everywhere: the 9-channel stack is [albedo 0:3, normals 3:6,
reflections 6:9] in the [-1, 1] network encoding. Instance normalization and
reflection padding throughout; base width is configurable (desk default 32).
All resolutions must be divisible by NETWORK_STRIDE.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

# the coarse-to-fine generator halves the input once and downsamples twice more
# inside the global stage; discriminators also reduce by 8 per scale path
NETWORK_STRIDE = 8
DISC_STRIDE = 8

CHANNEL_SLICES = {"A": slice(0, 3), "N": slice(3, 6), "F": slice(6, 9)}


@dataclass
class NetworkConfig:
    width: int = 32              # base feature width (global generator stage)
    renderer_global_blocks: int = 4
    renderer_local_blocks: int = 2
    decomposer_blocks: int = 5
    disc_scales: int = 2
    disc_layers: int = 3


class ResnetBlock(nn.Module):
    def __init__(self, dim):
        super().__init__()
        self.block = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(dim, dim, kernel_size=3),
            nn.InstanceNorm2d(dim),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(dim, dim, kernel_size=3),
            nn.InstanceNorm2d(dim),
        )

    def forward(self, x):
        return x + self.block(x)


def _down(in_ch, out_ch):
    return [nn.Conv2d(in_ch, out_ch, kernel_size=3, stride=2, padding=1),
            nn.InstanceNorm2d(out_ch), nn.ReLU(inplace=True)]


def _up(in_ch, out_ch):
    return [nn.ConvTranspose2d(in_ch, out_ch, kernel_size=3, stride=2,
                               padding=1, output_padding=1),
            nn.InstanceNorm2d(out_ch), nn.ReLU(inplace=True)]


class GlobalGenerator(nn.Module):
    """Downsample twice, run residual blocks, upsample back. When ``head=False``
    the final RGB projection is dropped and the module emits width-channel
    features (used inside the coarse-to-fine renderer)."""

    def __init__(self, in_channels, out_channels, width, n_blocks, head=True):
        super().__init__()
        layers = [nn.ReflectionPad2d(3), nn.Conv2d(in_channels, width, kernel_size=7),
                  nn.InstanceNorm2d(width), nn.ReLU(inplace=True)]
        layers += _down(width, width * 2)
        layers += _down(width * 2, width * 4)
        layers += [ResnetBlock(width * 4) for _ in range(n_blocks)]
        layers += _up(width * 4, width * 2)
        layers += _up(width * 2, width)
        if head:
            layers += [nn.ReflectionPad2d(3), nn.Conv2d(width, out_channels, kernel_size=7),
                       nn.Tanh()]
        self.model = nn.Sequential(*layers)

    def forward(self, x):
        return self.model(x)


class RendererNet(nn.Module):
    """Coarse-to-fine generator: a global stage on the half-resolution input plus
    one full-resolution local enhancer. 9 channels in, tanh-bounded RGB out."""

    def __init__(self, config: NetworkConfig = NetworkConfig(), in_channels=9, out_channels=3):
        super().__init__()
        w_local = max(config.width // 2, 4)
        self.global_stage = GlobalGenerator(in_channels, out_channels, config.width,
                                            config.renderer_global_blocks, head=False)
        self.local_down = nn.Sequential(
            nn.ReflectionPad2d(3), nn.Conv2d(in_channels, w_local, kernel_size=7),
            nn.InstanceNorm2d(w_local), nn.ReLU(inplace=True),
            *_down(w_local, config.width))
        self.local_up = nn.Sequential(
            *[ResnetBlock(config.width) for _ in range(config.renderer_local_blocks)],
            *_up(config.width, w_local),
            nn.ReflectionPad2d(3), nn.Conv2d(w_local, out_channels, kernel_size=7),
            nn.Tanh())
        self.downsample = nn.AvgPool2d(3, stride=2, padding=1, count_include_pad=False)

    def forward(self, x):
        coarse = self.global_stage(self.downsample(x))
        return self.local_up(self.local_down(x) + coarse)


class ResnetHead(nn.Module):
    """Single 3->3 translator with the configured number of residual blocks."""

    def __init__(self, width, n_blocks, bounded):
        super().__init__()
        layers = [nn.ReflectionPad2d(3), nn.Conv2d(3, width, kernel_size=7),
                  nn.InstanceNorm2d(width), nn.ReLU(inplace=True)]
        layers += _down(width, width * 2)
        layers += _down(width * 2, width * 4)
        layers += [ResnetBlock(width * 4) for _ in range(n_blocks)]
        layers += _up(width * 4, width * 2)
        layers += _up(width * 2, width)
        layers += [nn.ReflectionPad2d(3), nn.Conv2d(width, 3, kernel_size=7)]
        if bounded:
            layers += [nn.Tanh()]
        self.model = nn.Sequential(*layers)

    def forward(self, x):
        return self.model(x)


class DecomposerNet(nn.Module):
    """Three parameter-independent heads predicting albedo, normals and reflections.

    Albedo/reflection heads are tanh-bounded; the normal head is unbounded (unit
    length is encouraged by the normalization loss, not the architecture).
    Output is the 9-channel [A, N, F] stack.
    """

    def __init__(self, config: NetworkConfig = NetworkConfig()):
        super().__init__()
        self.albedo_head = ResnetHead(config.width, config.decomposer_blocks, bounded=True)
        self.normal_head = ResnetHead(config.width, config.decomposer_blocks, bounded=False)
        self.refl_head = ResnetHead(config.width, config.decomposer_blocks, bounded=True)

    def forward(self, image):
        return torch.cat([self.albedo_head(image), self.normal_head(image),
                          self.refl_head(image)], dim=1)

    def normals(self, image):
        return self.normal_head(image)


class PatchClassifier(nn.Module):
    """Fully-convolutional patch scorer; logits map at input/8 resolution."""

    def __init__(self, in_channels, width, n_layers):
        super().__init__()
        layers = [nn.Conv2d(in_channels, width, kernel_size=4, stride=2, padding=1),
                  nn.LeakyReLU(0.2, inplace=True)]
        ch = width
        for _ in range(n_layers - 1):
            layers += [nn.Conv2d(ch, ch * 2, kernel_size=4, stride=2, padding=1),
                       nn.InstanceNorm2d(ch * 2), nn.LeakyReLU(0.2, inplace=True)]
            ch *= 2
        layers += [nn.Conv2d(ch, 1, kernel_size=3, stride=1, padding=1)]
        self.model = nn.Sequential(*layers)

    def forward(self, x):
        return self.model(x)


class MultiScalePatchDiscriminator(nn.Module):
    """Independent patch classifiers at full and half resolution; raw logits."""

    def __init__(self, in_channels, config: NetworkConfig = NetworkConfig()):
        super().__init__()
        self.in_channels = in_channels
        self.scales = nn.ModuleList(
            [PatchClassifier(in_channels, config.width, config.disc_layers)
             for _ in range(config.disc_scales)])
        self.downsample = nn.AvgPool2d(3, stride=2, padding=1, count_include_pad=False)

    def forward(self, x) -> list[torch.Tensor]:
        if x.shape[1] != self.in_channels:
            raise ValueError(
                f"discriminator expects {self.in_channels} channels, got {x.shape[1]}")
        maps = []
        current = x
        for i, scale in enumerate(self.scales):
            maps.append(scale(current))
            if i + 1 < len(self.scales):
                current = self.downsample(current)
        return maps


def ablate_inputs(stack: torch.Tensor, drop) -> torch.Tensor:
    """Zero the dropped channel groups of a network-encoding stack (..., 9, H, W).

    ``drop`` is a subset of {"A", "N", "F"}; the tensor keeps its 9 channels so
    one architecture serves every input-ablation configuration.
    """
    drop = set(drop)
    unknown = drop - set(CHANNEL_SLICES)
    if unknown:
        raise ValueError(f"unknown channel groups: {sorted(unknown)}")
    if not drop:
        return stack
    out = stack.clone()
    for name in drop:
        out[..., CHANNEL_SLICES[name], :, :] = 0.0
    return out


def build_networks(config: NetworkConfig = NetworkConfig(), seed: int | None = None):
    """Construct (R, H, D_I, D_M) in a fixed order, optionally reseeding torch."""
    if seed is not None:
        torch.manual_seed(seed)
    renderer = RendererNet(config)
    decomposer = DecomposerNet(config)
    disc_image = MultiScalePatchDiscriminator(3, config)
    disc_intrinsics = MultiScalePatchDiscriminator(9, config)
    return renderer, decomposer, disc_image, disc_intrinsics


def count_parameters(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())
