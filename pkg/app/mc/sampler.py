"""W 的可复现采样

随机数来自计数器型的 Philox 生成器。第 b 个块的子流由 SeedSequence(seed, spawn_key=(b,)) 派生，
块大小固定，所以结果与线程数无关，逐位可复现。
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from app.manager.settings_manager import settings_manager
from app.model.kernels import ProductKernel
from app.model.spec import UStatisticSpec
from app.utils.errors import NoSampler, OutOfRange
from app.utils.logger import logger


@dataclass(frozen=True)
class RunConfig:
    """一次蒙特卡洛运行的参数

    Attributes:
        seed: 64 位种子
        sample_count: 样本数 m
        delta: DKW 置信参数
        block_size: 每个子流的样本数
        workers: 线程数，不影响结果
    """

    seed: int
    sample_count: int
    delta: float = 0.01
    block_size: int = 65536
    workers: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise OutOfRange(f"样本数 m={self.sample_count} 必须为正")
        if self.block_size < 1:
            raise OutOfRange(f"块大小 {self.block_size} 必须为正")
        if not 0.0 < self.delta < 1.0:
            raise OutOfRange(f"置信参数 δ={self.delta} 必须在 (0, 1) 内")
        if not 0 <= self.seed < 2**64:
            raise OutOfRange(f"种子 {self.seed} 必须是 64 位无符号整数")

    @classmethod
    def from_settings(cls, **overrides) -> "RunConfig":
        """settings.json 的 mc 段，值为 None 的覆盖项忽略"""
        mc = settings_manager.mc
        config = cls(
            seed=int(mc["seed"]),
            sample_count=int(mc["sample_count"]),
            delta=float(mc["delta"]),
            block_size=int(mc["block_size"]),
            workers=int(mc["workers"]),
        )
        return replace(config, **{k: v for k, v in overrides.items() if v is not None})

    @property
    def blocks(self) -> list[tuple[int, int]]:
        """(块编号, 块内样本数)"""
        full, rest = divmod(self.sample_count, self.block_size)
        sizes = [self.block_size] * full + ([rest] if rest else [])
        return list(enumerate(sizes))


def substream(config: RunConfig, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(config.seed, spawn_key=(block,))))


def _check_samplers(spec: UStatisticSpec) -> None:
    for subset, kernel in spec.kernels.items(spec.n) if spec.kernels.uniform is None else []:
        if not isinstance(kernel, ProductKernel) and not all(spec.variables[j].has_support for j in subset):
            logger.error(f"子集 {[j + 1 for j in subset]} 的取值表核需要有限支撑变量")
            raise NoSampler(f"子集 {[j + 1 for j in subset]} 的取值表核无法对只能采样的变量求值")
    for i, variable in enumerate(spec.variables):
        if not hasattr(variable, "sample"):
            raise NoSampler(f"X_{i + 1} 无法采样")


def _draw_block(spec: UStatisticSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    family = spec.kernels
    product = family.is_product
    columns = []
    indices = []
    for variable in spec.variables:
        if product or not variable.has_support:
            columns.append(variable.sample(rng, size))
            indices.append(None)
        else:
            index = variable.sample_index(rng, size)
            indices.append(index)
            columns.append(np.asarray([float(v) for v in variable.values], dtype=np.float64)[index])

    if family.uniform is not None:
        # e_p(x_1..x_n) 的逐列递推
        e = [np.ones(size)] + [np.zeros(size) for _ in range(spec.p)]
        for i, x in enumerate(columns):
            for k in range(min(i + 1, spec.p), 0, -1):
                e[k] = e[k] + x * e[k - 1]
        return float(family.uniform) * e[spec.p]
    if product and spec.p == 1:
        coefficients = np.zeros(spec.n)
        for (i,), a in family.coefficients(spec.n).items():
            coefficients[i] = float(a)
        return np.column_stack(columns) @ coefficients

    total = np.zeros(size)
    for subset, kernel in family.items(spec.n):
        if isinstance(kernel, ProductKernel):
            term = np.full(size, float(kernel.coefficient))
            for j in subset:
                term = term * columns[j]
        else:
            values = np.asarray(kernel.values, dtype=np.float64)
            term = values[tuple(indices[j] for j in subset)]
        total = total + term
    return total


def sample_w(spec: UStatisticSpec, config: RunConfig) -> np.ndarray:
    """W 的 m 个独立样本，按块顺序拼接

    Raises:
        NoSampler: 某个核无法在采样的变量上求值
    """
    _check_samplers(spec)
    blocks = config.blocks
    logger.info(f"{spec.label()}: 采样 m={config.sample_count}, 种子={config.seed}, 块数={len(blocks)}, 线程={config.workers}")

    def run(block: tuple[int, int]) -> np.ndarray:
        index, size = block
        return _draw_block(spec, substream(config, index), size)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(block) for block in blocks]
    return np.concatenate(parts)


def draw_w(spec: UStatisticSpec, seed: int, m: int, workers: Optional[int] = None) -> np.ndarray:
    """用设置中的块大小与 δ 采样 m 个点"""
    return sample_w(spec, RunConfig.from_settings(seed=seed, sample_count=m, workers=workers))
