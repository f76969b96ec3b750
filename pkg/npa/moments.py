"""
NPA 矩量矩阵的指标代数

生成元 A0, A1, B0, B1 是厄米对合（X² = I），A 与 B 的字母相互对易。
单元 (i, j) 的取值为 ⟨w_i† w_j⟩，按约化后的字分为等价类；
字与其伴随不视为相同（例如 ⟨A0A1⟩ 与 ⟨A1A0⟩ 各自成类）。
"""
import functools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from quantum.realization import local_observables, realization_state
from utils.errors import DomainError
from utils.logger import Logger

ALPHABET = ("A0", "A1", "B0", "B1")

LEVEL_WORDS = {
    "1": ("", "A0", "A1", "B0", "B1"),
    "1+AB": ("", "A0", "A1", "B0", "B1", "A0B0", "A0B1", "A1B0", "A1B1"),
    "2": ("", "A0", "A1", "B0", "B1", "A0A1", "A0B0", "A0B1", "A1A0", "A1B0", "A1B1", "B0B1", "B1B0"),
}


def _reduce(letters):
    stack = []
    for letter in letters:
        if stack and stack[-1] == letter:
            stack.pop()
        else:
            stack.append(letter)
    return stack


@dataclass(frozen=True)
class OperatorWord:
    letters: Tuple[str, ...] = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        unknown = [letter for letter in letters if letter not in ALPHABET]
        if unknown:
            message = f"算符字包含未知字母 {unknown}，字母表为 {ALPHABET}"
            Logger.error(message)
            raise DomainError(message)
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text):
        """"A0B1" -> ("A0", "B1")；"" 或 "I" 为单位算符"""
        text = "" if text == "I" else text
        if len(text) % 2:
            message = f"无法解析算符字 {text!r}"
            Logger.error(message)
            raise DomainError(message)
        return cls(tuple(text[k:k + 2] for k in range(0, len(text), 2)))

    def __str__(self):
        return "".join(self.letters) or "I"

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other):
        return OperatorWord(self.letters + other.letters)

    def adjoint(self):
        return OperatorWord(self.letters[::-1])

    def canonical(self):
        """A 字母移到 B 字母之前（保持各自顺序），再消去相邻的重复字母"""
        alice = _reduce([letter for letter in self.letters if letter[0] == "A"])
        bob = _reduce([letter for letter in self.letters if letter[0] == "B"])
        return OperatorWord(tuple(alice + bob))

    @property
    def is_canonical(self):
        return self == self.canonical()


def normalize_level(level):
    key = str(level).upper().replace(" ", "")
    if key not in LEVEL_WORDS:
        message = f"NPA 层级（{level}）错误, 支持的层级：({', '.join(LEVEL_WORDS)})"
        Logger.error(message)
        raise DomainError(message)
    return key


@dataclass(frozen=True, eq=False)
class MomentStructure:
    level: str
    words: Tuple[OperatorWord, ...]
    # entry_class[i, j] 为单元 (i, j) 所属类的编号，对称
    entry_class: np.ndarray
    class_words: Tuple[OperatorWord, ...]
    # 每个类的上三角单元，第一个为代表元
    classes: Dict[int, List[Tuple[int, int]]]
    unit_classes: FrozenSet[int]

    @property
    def dim(self):
        return len(self.words)

    @property
    def num_classes(self):
        return len(self.class_words)

    @property
    def free_entries(self):
        """取值不固定的类，即 SDP 的自由变量"""
        return [cid for cid in range(self.num_classes) if cid not in self.unit_classes]

    def class_of(self, word):
        """
        由字（字符串或 OperatorWord）查所属类编号
        :return: int
        """
        if isinstance(word, str):
            word = OperatorWord.parse(word)
        target = word.canonical()
        for cid, class_word in enumerate(self.class_words):
            if class_word == target:
                return cid
        message = f"层级 {self.level} 的矩量矩阵中不存在 ⟨{target}⟩"
        Logger.error(message)
        raise DomainError(message)

    def equality_groups(self):
        """矩阵结构所蕴含的等式：每个非单位类中多于一个单元的集合"""
        return [frozenset(self.classes[cid]) for cid in self.free_entries if len(self.classes[cid]) > 1]

    def moment_matrix(self, values):
        """由各类取值（长度为类数的向量）组装 Γ"""
        values = np.asarray(values, dtype=float)
        return values[self.entry_class]

    def moments_from_matrix(self, gamma):
        """按代表元读取各类取值"""
        return np.array([gamma[cells[0]] for cid, cells in sorted(self.classes.items())])


@functools.lru_cache(maxsize=None)
def build_moment_structure(level="2"):
    key = normalize_level(level)
    words = tuple(OperatorWord.parse(w) for w in LEVEL_WORDS[key])
    n = len(words)
    entry_class = np.zeros((n, n), dtype=int)
    class_words = []
    classes = {}
    for i in range(n):
        for j in range(i, n):
            word = (words[i].adjoint() * words[j]).canonical()
            if word in class_words:
                cid = class_words.index(word)
            else:
                cid = len(class_words)
                class_words.append(word)
                classes[cid] = []
            classes[cid].append((i, j))
            entry_class[i, j] = entry_class[j, i] = cid
    entry_class.setflags(write=False)
    unit = frozenset(cid for cid, word in enumerate(class_words) if len(word) == 0)
    Logger.debug(f"NPA 层级 {key}：{n}×{n} 矩阵，{len(class_words)} 个类")
    return MomentStructure(
        level=key,
        words=words,
        entry_class=entry_class,
        class_words=tuple(class_words),
        classes=classes,
        unit_classes=unit,
    )


def correlator_moments(s, c):
    """
    由关联函数填入 ⟨A_x⟩、⟨B_y⟩、⟨A_xB_y⟩ 各类，其余非单位类置 0
    :param s: MomentStructure
    :param c: bell.behavior.Correlators
    :return: 类取值向量
    """
    values = np.zeros(s.num_classes)
    for cid in s.unit_classes:
        values[cid] = 1.0
    for x in range(2):
        values[s.class_of(f"A{x}")] = c.A[x]
        values[s.class_of(f"B{x}")] = c.B[x]
        for y in range(2):
            values[s.class_of(f"A{x}B{y}")] = c.AB[x, y]
    return values


def moment_vector_from_realization(s, r):
    """
    对两比特量子实现逐类计算 ⟨ψ|W|ψ⟩，所得 Γ 是 Gram 矩阵，必然半正定
    """
    psi = realization_state(r)
    alice, bob = local_observables(r)
    operators = {"A0": alice[0], "A1": alice[1], "B0": bob[0], "B1": bob[1]}
    values = np.empty(s.num_classes)
    for cid, word in enumerate(s.class_words):
        op = np.eye(4)
        for letter in word.letters:
            op = op @ operators[letter]
        values[cid] = psi @ op @ psi
    return values
