"""Synthetic genotype/phenotype data with planted pleiotropic effects.

Founder genotypes are drawn from independent SNPs with uniform allele
frequencies; further individuals come from random mating of the founders
without recombination. Traits fall into groups; each group is driven by its
own set of causal SNPs, optionally with one SNP shared by the first two
groups and one SNP shared by all traits.

Every stage draws from its own named random stream derived from the master
seed, so any single stage can be re-run in isolation.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from gflasso.data import GenotypeMatrix, NoiseSpec, PhenotypeMatrix, center_columns
from gflasso.errors import ConfigurationError, DimensionError


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for the named stage of a seeded run."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, int(seed) >> 32, zlib.crc32(name.encode())])


@dataclass(frozen=True)
class SimulationSpec:
    n_founders: int = 60
    n_offspring: int = 190
    n_samples: int | None = None
    n_test: int = 50
    n_snps_total: int = 697
    n_snps_kept: int = 50
    maf_min: float = 0.1
    n_traits: int = 10
    group_sizes: tuple[int, ...] = (3, 3, 4)
    snps_per_group: tuple[int, ...] = (3, 4, 4)
    extra_bridge_snp: bool = True
    extra_global_snp: bool = True
    effect_size: float = 0.5
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "group_sizes", tuple(int(g) for g in self.group_sizes))
        object.__setattr__(self, "snps_per_group", tuple(int(g) for g in self.snps_per_group))
        if isinstance(self.noise, dict):
            object.__setattr__(self, "noise", NoiseSpec(**self.noise))
        if sum(self.group_sizes) != self.n_traits:
            raise ConfigurationError(
                f"group_sizes {list(self.group_sizes)} must sum to n_traits={self.n_traits}")
        if len(self.snps_per_group) != len(self.group_sizes):
            raise ConfigurationError("snps_per_group needs one entry per trait group")
        if any(g < 1 for g in self.group_sizes) or any(s < 0 for s in self.snps_per_group):
            raise ConfigurationError("group sizes must be >= 1 and SNP counts >= 0")
        if self.extra_bridge_snp and len(self.group_sizes) < 2:
            raise ConfigurationError("extra_bridge_snp needs at least two trait groups")
        if not 0 <= self.maf_min < 0.5:
            raise ConfigurationError(f"maf_min must lie in [0, 0.5), got {self.maf_min}")
        if self.n_founders < 2:
            raise ConfigurationError("need at least two founders")
        if self.n_snps_kept < 1 or self.n_snps_kept > self.n_snps_total:
            raise ConfigurationError("n_snps_kept must lie in 1..n_snps_total")
        pool = self.n_founders + self.n_offspring
        if self.n_samples is not None and not 3 <= self.n_samples <= pool:
            raise ConfigurationError(f"n_samples must lie in 3..{pool}")

    @property
    def n_causal_snps(self) -> int:
        return sum(self.snps_per_group) + int(self.extra_bridge_snp) + int(self.extra_global_snp)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["group_sizes"] = list(self.group_sizes)
        d["snps_per_group"] = list(self.snps_per_group)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown simulation fields: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class GroundTruth:
    true_beta: np.ndarray
    causal_pairs: frozenset

    @classmethod
    def from_beta(cls, beta) -> "GroundTruth":
        beta = np.array(beta, dtype=float)
        beta.setflags(write=False)
        pairs = frozenset((int(j), int(k)) for j, k in np.argwhere(beta != 0))
        return cls(beta, pairs)

    @property
    def mask(self) -> np.ndarray:
        return self.true_beta != 0


@dataclass(frozen=True)
class SimulatedDataset:
    genotypes: GenotypeMatrix
    phenotypes: PhenotypeMatrix
    truth: GroundTruth
    test_genotypes: GenotypeMatrix
    test_phenotypes: PhenotypeMatrix
    spec: SimulationSpec


def _maf(g: np.ndarray) -> np.ndarray:
    p = g.mean(axis=0) / 2.0
    return np.minimum(p, 1.0 - p)


def generate_founders(n: int, n_snps: int, rng: np.random.Generator, maf_range=(0.1, 0.5),
                      maf_min: float = 0.0, max_redraws: int = 1000) -> GenotypeMatrix:
    """Hardy-Weinberg genotypes; columns whose realized MAF <= ``maf_min`` are redrawn."""
    if n_snps < 1:
        raise ConfigurationError("need at least one SNP")
    if n < 2:
        raise ConfigurationError("need at least two founders")
    lo, hi = maf_range
    if not 0 < lo <= hi <= 0.5:
        raise ConfigurationError(f"maf_range must lie within (0, 0.5], got {maf_range}")
    g = np.empty((n, n_snps), dtype=np.int8)
    todo = np.arange(n_snps)
    for _ in range(max_redraws):
        freq = rng.uniform(lo, hi, size=todo.size)
        g[:, todo] = rng.binomial(2, freq, size=(n, todo.size))
        todo = todo[_maf(g[:, todo]) <= maf_min]
        if todo.size == 0:
            return GenotypeMatrix(g)
    raise ConfigurationError(f"could not reach MAF > {maf_min} with {n} founders")


def random_mating(founders: GenotypeMatrix, n_offspring: int, rng: np.random.Generator) -> GenotypeMatrix:
    """Each child has two distinct parents; each parent passes one allele per SNP independently."""
    f = founders.values
    n = f.shape[0]
    if n < 2:
        raise ConfigurationError("random mating needs at least two founders")
    if n_offspring == 0:
        return GenotypeMatrix(np.zeros((0, f.shape[1]), dtype=np.int8), founders.snp_ids)
    parents = np.array([rng.choice(n, size=2, replace=False) for _ in range(n_offspring)])
    child = np.zeros((n_offspring, f.shape[1]), dtype=np.int8)
    for side in range(2):
        g = f[parents[:, side]]
        coin = rng.integers(0, 2, size=g.shape, dtype=np.int8)
        child += np.where(g == 1, coin, g // 2).astype(np.int8)
    ids = tuple(f"off_{i + 1}" for i in range(n_offspring))
    return GenotypeMatrix(child, founders.snp_ids, ids)


def trait_groups(group_sizes) -> list[np.ndarray]:
    bounds = np.cumsum([0, *group_sizes])
    return [np.arange(bounds[g], bounds[g + 1]) for g in range(len(group_sizes))]


def plant_truth(spec: SimulationSpec, n_snps: int, rng: np.random.Generator) -> GroundTruth:
    """Assign ``effect_size`` to disjoint causal SNP sets, one set per trait group plus extras."""
    need = spec.n_causal_snps
    if n_snps < need:
        raise ConfigurationError(f"{need} causal SNPs requested but only {n_snps} SNPs available")
    beta = np.zeros((n_snps, spec.n_traits))
    if spec.effect_size == 0:
        return GroundTruth.from_beta(beta)
    picks = rng.choice(n_snps, size=need, replace=False)
    groups = trait_groups(spec.group_sizes)
    pos = 0
    for traits, count in zip(groups, spec.snps_per_group):
        for j in picks[pos:pos + count]:
            beta[j, traits] = spec.effect_size
        pos += count
    if spec.extra_bridge_snp:
        beta[picks[pos], np.concatenate(groups[:2])] = spec.effect_size
        pos += 1
    if spec.extra_global_snp:
        beta[picks[pos], :] = spec.effect_size
    return GroundTruth.from_beta(beta)


def generate_phenotypes(x: GenotypeMatrix, truth: GroundTruth, noise: NoiseSpec,
                        rng: np.random.Generator, x_means=None, center: bool = True) -> PhenotypeMatrix:
    """Y = X_c B + E with Gaussian E; columns centered afterwards unless ``center`` is off.

    ``x_means`` overrides the centering of X (use training means for held-out individuals).
    """
    b = truth.true_beta
    if b.shape[0] != x.n_snps:
        raise DimensionError(f"truth has {b.shape[0]} SNPs, genotypes have {x.n_snps}")
    xc = x.centered if x_means is None else x.centered_with(x_means)
    y = xc @ b + rng.normal(noise.mean, np.sqrt(noise.variance), size=(x.n_individuals, b.shape[1]))
    if center:
        y = center_columns(y)
    return PhenotypeMatrix(y, sample_ids=x.sample_ids)


def simulate(spec: SimulationSpec, seed: int | None = None) -> SimulatedDataset:
    """Full pipeline: founders, mating, MAF filter, SNP subsampling, truth, phenotypes, test set."""
    seed = spec.seed if seed is None else seed
    founders = generate_founders(spec.n_founders, spec.n_snps_total, stream(seed, "founders"),
                                 (max(spec.maf_min, 1e-3), 0.5), maf_min=spec.maf_min)
    founders = GenotypeMatrix(founders.values, founders.snp_ids,
                              tuple(f"fnd_{i + 1}" for i in range(spec.n_founders)))
    offspring = random_mating(founders, spec.n_offspring, stream(seed, "mating"))
    pool = np.vstack([founders.values, offspring.values])
    pool_ids = founders.sample_ids + offspring.sample_ids

    keep = np.flatnonzero(_maf(pool) > spec.maf_min)
    if keep.size < spec.n_snps_kept:
        raise ConfigurationError(
            f"only {keep.size} SNPs pass MAF > {spec.maf_min}; {spec.n_snps_kept} requested")
    snps = np.sort(stream(seed, "snps").choice(keep, size=spec.n_snps_kept, replace=False))
    snp_ids = tuple(founders.snp_ids[j] for j in snps)

    rows = np.arange(pool.shape[0])
    if spec.n_samples is not None and spec.n_samples < pool.shape[0]:
        rows = np.sort(stream(seed, "sample").choice(pool.shape[0], size=spec.n_samples, replace=False))
    x = GenotypeMatrix(pool[np.ix_(rows, snps)], snp_ids, tuple(pool_ids[i] for i in rows))

    truth = plant_truth(spec, spec.n_snps_kept, stream(seed, "truth"))
    y = generate_phenotypes(x, truth, spec.noise, stream(seed, "noise"))
    y = PhenotypeMatrix(y.values, tuple(f"trait_{k + 1}" for k in range(spec.n_traits)), x.sample_ids)

    kept_founders = GenotypeMatrix(founders.values[:, snps], snp_ids, founders.sample_ids)
    test_x = random_mating(kept_founders, spec.n_test, stream(seed, "test_mating"))
    test_x = GenotypeMatrix(test_x.values, snp_ids, tuple(f"test_{i + 1}" for i in range(spec.n_test)))
    test_y = generate_phenotypes(test_x, truth, spec.noise, stream(seed, "test_noise"),
                                 x_means=x.means, center=False)
    test_y = PhenotypeMatrix(test_y.values, y.trait_ids, test_x.sample_ids)
    return SimulatedDataset(x, y, truth, test_x, test_y, spec)


def simulate_block_cohort(n: int, n_snps: int, group_sizes, snps_per_group, effect_size: float,
                          within_corr: float, seed: int, maf_min: float = 0.1) -> SimulatedDataset:
    """Cohort with strongly correlated trait blocks, for sparsity-count comparisons.

    Traits in a block of size > 1 share a latent Gaussian factor so that their
    noise correlation is ``within_corr``; singleton blocks get independent
    noise. Causal SNPs are planted per block as in ``plant_truth``.
    """
    k = int(sum(group_sizes))
    spec = SimulationSpec(n_founders=n, n_offspring=0, n_test=0, n_snps_total=n_snps, n_snps_kept=n_snps,
                          maf_min=maf_min, n_traits=k, group_sizes=tuple(group_sizes),
                          snps_per_group=tuple(snps_per_group), extra_bridge_snp=False,
                          extra_global_snp=False, effect_size=effect_size, seed=seed)
    x = generate_founders(n, n_snps, stream(seed, "founders"), (max(maf_min, 1e-3), 0.5), maf_min)
    truth = plant_truth(spec, n_snps, stream(seed, "truth"))
    rng = stream(seed, "noise")
    noise = rng.normal(size=(n, k))
    for traits in trait_groups(group_sizes):
        if traits.size > 1:
            u = rng.normal(size=(n, 1))
            noise[:, traits] = np.sqrt(within_corr) * u + np.sqrt(1 - within_corr) * noise[:, traits]
    y = center_columns(x.centered @ truth.true_beta + noise)
    y = PhenotypeMatrix(y, sample_ids=x.sample_ids)
    empty_x = GenotypeMatrix(np.zeros((0, n_snps), dtype=np.int8), x.snp_ids)
    empty_y = PhenotypeMatrix(np.zeros((0, k)), y.trait_ids)
    return SimulatedDataset(x, y, truth, empty_x, empty_y, spec)
