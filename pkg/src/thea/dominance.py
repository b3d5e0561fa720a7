"""The five-element dominance relation used by the duel game.

The relation is a regular tournament: every element beats exactly two
others and loses to the remaining two, so no element is privileged.  The
shipped default is generated from the cycle order (fire, metal, earth,
water, wood) with each element beating the next two — which contains both
anchor facts metal>earth and fire>metal.  Configs may supply any relation;
the validator rejects anything that is not a regular tournament.
"""

from __future__ import annotations

from dataclasses import dataclass

from thea.errors import ConfigError
from thea.gestures import Element

_DEFAULT_CYCLE = (Element.FIRE, Element.METAL, Element.EARTH, Element.WATER, Element.WOOD)


@dataclass(frozen=True)
class DominanceMatrix:
    """Irreflexive, complete, regular beats-relation on the five elements."""

    pairs: frozenset[tuple[Element, Element]]  # (winner, loser)

    def beats(self, a: Element, b: Element) -> bool:
        return (a, b) in self.pairs

    def validate(self) -> "DominanceMatrix":
        elements = list(Element)
        for e in elements:
            if self.beats(e, e):
                raise ConfigError(f"dominance is reflexive at {e.value}")
        for i, a in enumerate(elements):
            for b in elements[i + 1:]:
                fwd, back = self.beats(a, b), self.beats(b, a)
                if fwd == back:
                    raise ConfigError(
                        f"exactly one of {a.value}>{b.value} / {b.value}>{a.value} must hold"
                    )
        for e in elements:
            wins = sum(self.beats(e, other) for other in elements)
            if wins != 2:
                raise ConfigError(f"{e.value} beats {wins} elements, expected exactly 2")
        return self

    @classmethod
    def from_wins(cls, wins: dict[Element, list[Element]]) -> "DominanceMatrix":
        pairs = frozenset((w, l) for w, losers in wins.items() for l in losers)
        return cls(pairs).validate()

    @classmethod
    def default(cls) -> "DominanceMatrix":
        n = len(_DEFAULT_CYCLE)
        pairs = set()
        for i, e in enumerate(_DEFAULT_CYCLE):
            pairs.add((e, _DEFAULT_CYCLE[(i + 1) % n]))
            pairs.add((e, _DEFAULT_CYCLE[(i + 2) % n]))
        return cls(frozenset(pairs)).validate()

    def as_wins(self) -> dict[str, list[str]]:
        """Config-file form: winner -> sorted loser names."""
        out: dict[str, list[str]] = {}
        for e in Element:
            out[e.value] = sorted(l.value for (w, l) in self.pairs if w is e)
        return out
