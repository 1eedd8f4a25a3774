"""
Evaluation of the power-law family f_a(x) = a - |x|^r and of its critical
orbit, with the parameter-derivative recursion and overflow-safe derivative
products.
"""
from typing import Tuple

from .errors import NotSelfMap, OrbitEscaped
from .model import OrbitBuffer, PowerLawMap, SignedLogProduct


def escape_bound(a: float) -> float:
    """Any orbit point beyond this magnitude never returns to a core interval."""
    return 4.0 * max(a, 1.0) + 1.0


def power(x: float, r: float) -> float:
    """|x|^r, with 0 mapped to 0."""
    if x == 0:
        return 0.0
    return abs(x) ** r


def evaluate(fmap: PowerLawMap, x: float) -> float:
    return fmap.a - power(x, fmap.r)


def phase_derivative(fmap: PowerLawMap, x: float) -> float:
    """f_a'(x) = -r sgn(x) |x|^(r-1); zero at the critical point."""
    if x == 0:
        return 0.0
    slope = fmap.r * power(x, fmap.r - 1.0)
    return -slope if x > 0 else slope


def core_interval(fmap: PowerLawMap) -> Tuple[float, float]:
    """
    The dynamical core [f_a(a), a] = [a - a^r, a].

    Raises:
        NotSelfMap: when a > 2^{1/(r-1)}, where f_a(lo) < lo.
    """
    if fmap.a > fmap.a_full:
        raise NotSelfMap(
            f"a={fmap.a!r} is outside the valid window (0, {fmap.a_full!r}] for r={fmap.r!r}",
            a=fmap.a,
            r=fmap.r,
            a_full=fmap.a_full,
        )
    return fmap.a - power(fmap.a, fmap.r), fmap.a


def critical_orbit(fmap: PowerLawMap, n: int, with_derivs: bool = False) -> OrbitBuffer:
    """
    Compute w_i = f_a^i(0) for i = 1..n.

    For self-maps the orbit is kept inside the core interval, which is
    invariant; round-off at the boundary fixed point would otherwise push
    the orbit out of it.

    Args:
        fmap: The map.
        n: Orbit depth, at least 1.
        with_derivs: Also compute D_i = d/da f_a^i(0) by
            D_1 = 1, D_{i+1} = 1 + f'(w_i) D_i.

    Raises:
        OrbitEscaped: if some |w_i| exceeds `escape_bound(a)`.
    """
    if n < 1:
        raise ValueError(f"orbit depth must be positive, got {n}")
    a = fmap.a
    bound = escape_bound(a)
    clamp = None
    if fmap.is_self_map:
        clamp = core_interval(fmap)

    values = [a]
    derivs = [1.0] if with_derivs else None
    w = a
    for i in range(1, n):
        if with_derivs:
            derivs.append(1.0 + phase_derivative(fmap, w) * derivs[-1])
        w = evaluate(fmap, w)
        if clamp is not None:
            w = min(max(w, clamp[0]), clamp[1])
        elif abs(w) > bound:
            raise OrbitEscaped(
                f"critical orbit of a={a!r}, r={fmap.r!r} escaped at step {i + 1}",
                a=a,
                r=fmap.r,
                step=i + 1,
            )
        values.append(w)

    return OrbitBuffer(
        values=tuple(values),
        param_derivs=tuple(derivs) if with_derivs else None,
    )


def derivative_product(fmap: PowerLawMap, values) -> SignedLogProduct:
    """Signed-log product of f'(w) over the given orbit points."""
    product = SignedLogProduct.one()
    for w in values:
        product = product.times(phase_derivative(fmap, w))
        if product.sign == 0:
            break
    return product


def orbit_derivative_product(fmap: PowerLawMap, n: int) -> SignedLogProduct:
    """
    Df_a^{n-1}(f_a(0)) = prod_{j=1}^{n-1} f'(w_j) in signed-log form.

    A zero result (sign 0) means the orbit hits the critical point before
    step n.
    """
    if n == 1:
        return SignedLogProduct.one()
    orbit = critical_orbit(fmap, n - 1)
    return derivative_product(fmap, orbit.values)
