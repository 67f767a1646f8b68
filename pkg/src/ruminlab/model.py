"""Homogeneous model manifolds: the unit-group 3-sphere and its lens quotients.

The frame {T, X, Y} is normalized so that

    [X, Y] = -T,   [T, X] = -2 Y,   [T, Y] = 2 X,   J X = Y,  J Y = -X,

which makes the contact-metric frame orthonormal for g = dtheta(., J.) + theta x theta
and the Reeb flow a rotation of weight 2 on the complex coframe.  Invariant
function spaces are weight blocks: the block of weight m has dimension
(m+1)^2 and carries the frame fields as exact matrices built from the standard
raising/lowering recurrences of the spin-(m/2) representation (half-integer
arithmetic is exact, only the square roots are floating point).

Lens quotients act on the opposite tensor slot from the frame fields, so their
blocks are plain column selections: the weight-slot rows with 2*mu = l (mod p)
for the order-p quotient twisted by the character indexed by l.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import exterior as ext


class ParameterError(ValueError):
    """Invalid model parameter (bad character, negative weight, ...)."""


# -- frame ---------------------------------------------------------------------


@dataclass(frozen=True)
class FrameStructure:
    """Bracket constants and complex structure of an invariant contact frame.

    Field order is (T, X_1, Y_1, ..., X_n, Y_n); ``brackets[a, b, c]`` is the
    coefficient of field c in [field_a, field_b].  The dual coframe shares the
    ordering of :mod:`ruminlab.exterior` (theta, e^1, f^1, ...).
    """

    n: int
    brackets: np.ndarray
    j_matrix: np.ndarray

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def field_names(self) -> Tuple[str, ...]:
        if self.n == 1:
            return ("T", "X", "Y")
        names = ["T"]
        for i in range(1, self.n + 1):
            names += [f"X{i}", f"Y{i}"]
        return tuple(names)

    def dtheta_bilinear(self) -> np.ndarray:
        """dtheta evaluated on frame pairs, from dtheta(U, V) = -theta([U, V])."""
        return -self.brackets[:, :, 0]

    def coframe_differential(self, a: int) -> ext.PointwiseForm:
        """d of the a-th real coframe element, from the structure constants."""
        coeffs: Dict[Tuple[int, ...], complex] = {}
        for u in range(self.dim):
            for v in range(u + 1, self.dim):
                c = self.brackets[u, v, a]
                if c != 0:
                    coeffs[(u, v)] = coeffs.get((u, v), 0.0) - c
        return ext.from_real(self.n, coeffs)

    def dtheta_form(self) -> ext.PointwiseForm:
        return self.coframe_differential(0)

    def metric_on_frame(self) -> np.ndarray:
        """g(V_a, V_b) = dtheta(V_a, J V_b) + theta(V_a) theta(V_b)."""
        dth = self.dtheta_bilinear()
        jfull = np.zeros((self.dim, self.dim))
        jfull[1:, 1:] = self.j_matrix
        g = dth @ jfull
        g[0, 0] += 1.0
        return g

    def validate(self, tol: float = 1e-13):
        """Check every structural invariant; raises AssertionError on failure."""
        c = self.brackets
        assert np.max(np.abs(c + np.transpose(c, (1, 0, 2)))) <= tol, "brackets not antisymmetric"
        # Jacobi identity
        jac = np.einsum("abx,xcg->abcg", c, c)
        jac = jac + np.transpose(jac, (1, 2, 0, 3)) + np.transpose(jac, (2, 0, 1, 3))
        assert np.max(np.abs(jac)) <= tol, "Jacobi identity fails"
        # Reeb conditions: iota_T dtheta = 0
        assert np.max(np.abs(self.dtheta_bilinear()[0, :])) <= tol, "iota_T dtheta != 0"
        # contact condition: theta ^ (dtheta)^n is the full volume
        form = ext.theta(self.n)
        dth = self.dtheta_form()
        for _ in range(self.n):
            form = ext.wedge(form, dth)
        assert ext.norm(form) > tol, "theta ^ dtheta^n vanishes"
        # the frame is orthonormal for the contact metric
        assert np.max(np.abs(self.metric_on_frame() - np.eye(self.dim))) <= tol, "frame not orthonormal"
        # J^2 = -1 on H
        assert np.max(np.abs(self.j_matrix @ self.j_matrix + np.eye(2 * self.n))) <= tol
        # Sasakian: ad_T restricted to H commutes with J
        ad_t = c[0, 1:, 1:]
        assert np.max(np.abs(ad_t.T @ self.j_matrix - self.j_matrix @ ad_t.T)) <= tol, "L_T J != 0"
        # CR integrability: [H10, H10] in H10 for the constant frame
        zvecs = []
        for i in range(self.n):
            z = np.zeros(self.dim, dtype=complex)
            z[1 + 2 * i] = 1.0
            z[2 + 2 * i] = -1.0j
            zvecs.append(z)
        jfull = np.zeros((self.dim, self.dim), dtype=complex)
        jfull[1:, 1:] = self.j_matrix
        for za in zvecs:
            for zb in zvecs:
                br = np.einsum("a,b,abc->c", za, zb, c.astype(complex))
                # bracket must again be a +i eigenvector of J with no Reeb part
                assert abs(br[0]) <= tol
                assert np.max(np.abs(jfull @ br - 1j * br)) <= tol, "[H10, H10] leaves H10"


def su2_frame() -> FrameStructure:
    c = np.zeros((3, 3, 3))
    c[1, 2, 0], c[2, 1, 0] = -1.0, 1.0   # [X, Y] = -T
    c[0, 1, 2], c[1, 0, 2] = -2.0, 2.0   # [T, X] = -2Y
    c[0, 2, 1], c[2, 0, 1] = 2.0, -2.0   # [T, Y] = 2X
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    return FrameStructure(n=1, brackets=c, j_matrix=j)


# -- weight blocks ---------------------------------------------------------------


def _ladder_matrices(m: int):
    """Spin-(m/2) J_z, J_plus, J_minus in the ascending-weight basis, exact radicands."""
    j = Fraction(m, 2)
    mus = [Fraction(-m, 2) + k for k in range(m + 1)]
    jz = np.diag([float(mu) for mu in mus])
    jp = np.zeros((m + 1, m + 1))
    jm = np.zeros((m + 1, m + 1))
    for k, mu in enumerate(mus):
        if k + 1 <= m:
            jp[k + 1, k] = math.sqrt(float(j * (j + 1) - mu * (mu + 1)))
        if k - 1 >= 0:
            jm[k - 1, k] = math.sqrt(float(j * (j + 1) - mu * (mu - 1)))
    return jz, jp, jm


def su2_weight_actions(m: int) -> Dict[str, np.ndarray]:
    """Frame-field matrices on the weight-m representation slot."""
    jz, jp, jm = _ladder_matrices(m)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    return {
        "T": 2j * jz.astype(complex),
        "X": (-1j * inv_sqrt2) * (jp + jm).astype(complex),
        "Y": (-inv_sqrt2) * (jp - jm).astype(complex),
    }


def allowed_weight_slots(m: int, p: int, character: int) -> List[int]:
    """Positions k (ascending weight mu = -m/2 + k) with 2*mu = character (mod p)."""
    return [k for k in range(m + 1) if (2 * k - m - character) % p == 0]


def deck_generator_matrix(m: int, p: int) -> np.ndarray:
    """Action of the order-p deck generator on the full weight-m block."""
    zeta = np.exp(2j * np.pi / p)
    phases = np.array([zeta ** (2 * k - m) for k in range(m + 1)])
    return np.kron(np.eye(m + 1, dtype=complex), np.diag(phases))


@dataclass(frozen=True)
class FunctionBlock:
    """A finite invariant function space with exact matrix frame-field actions."""

    label: str
    weight: int
    dim: int
    actions: Dict[str, np.ndarray]
    character: int = 0
    group_order: int = 1

    def action(self, name: str) -> np.ndarray:
        return self.actions[name]

    def validate(self, frame: FrameStructure, tol: float = 1e-13):
        names = ("T", "X", "Y")
        mats = [self.actions[nm] for nm in names]
        for a in mats:
            assert np.max(np.abs(a + a.conj().T)) <= tol, "field action not skew-Hermitian"
        c = frame.brackets
        for a in range(3):
            for b in range(3):
                comm = mats[a] @ mats[b] - mats[b] @ mats[a]
                expect = sum(c[a, b, g] * mats[g] for g in range(3))
                assert np.max(np.abs(comm - expect)) <= tol, "bracket constants not reproduced"


def su2_block(m: int, p: int = 1, character: int = 0) -> FunctionBlock:
    """Weight-m block of the sphere or of the order-p lens quotient."""
    slots = allowed_weight_slots(m, p, character) if p > 1 else list(range(m + 1))
    r = len(slots)
    acts = {}
    for name, a in su2_weight_actions(m).items():
        acts[name] = np.kron(a, np.eye(r, dtype=complex))
    return FunctionBlock(
        label=f"m{m}",
        weight=m,
        dim=(m + 1) * r,
        actions=acts,
        character=character,
        group_order=p,
    )


# -- manifolds ---------------------------------------------------------------------


@dataclass(frozen=True)
class FlatBundle:
    """Rank-one flat bundle given by a character index l of the deck group."""

    character: int = 0
    rank: int = 1


@dataclass(frozen=True)
class ModelManifold:
    frame: FrameStructure
    p: int = 1
    character: int = 0
    name: str = "s3"

    @property
    def fundamental_group_order(self) -> int:
        return self.p

    @property
    def volume(self) -> float:
        # orthonormal-frame metric doubles the horizontal round metric,
        # so vol = sqrt(det) * 2 pi^2 = 4 pi^2, divided by the quotient order
        return 4.0 * math.pi ** 2 / self.p

    def blocks(self, max_weight: int) -> List[FunctionBlock]:
        if max_weight < 0:
            raise ParameterError("max_weight must be >= 0")
        return [su2_block(m, self.p, self.character) for m in range(max_weight + 1)]

    def nonempty_blocks(self, max_weight: int) -> List[FunctionBlock]:
        return [b for b in self.blocks(max_weight) if b.dim > 0]

    def describe(self, max_weight: Optional[int] = None) -> dict:
        doc = {
            "schema": 1,
            "model": self.name,
            "n": self.frame.n,
            "p": self.p,
            "character": self.character,
            "bracket_constants": self.frame.brackets.tolist(),
            "volume": self.volume,
        }
        if max_weight is not None:
            doc["max_weight"] = max_weight
        return doc

    def to_json(self, max_weight: Optional[int] = None) -> str:
        return json.dumps(self.describe(max_weight), sort_keys=True)


def su2_model() -> ModelManifold:
    return ModelManifold(frame=su2_frame(), p=1, character=0, name="s3")


def lens_space(p: int, bundle: Optional[FlatBundle] = None, character: int = 0) -> ModelManifold:
    """Order-p lens quotient, optionally twisted by a deck-group character."""
    if p < 1:
        raise ParameterError("p must be >= 1")
    l = bundle.character if bundle is not None else character
    if not 0 <= l < p:
        raise ParameterError(f"character {l} invalid for p={p}")
    return ModelManifold(frame=su2_frame(), p=p, character=l, name="s3" if p == 1 else "lens")


def volume(model: ModelManifold) -> float:
    return model.volume
