"""Pure-Python term-map kernel.

A polynomial is a plain dict mapping packed exponent keys to nonzero int
coefficients.  A logical key is a tuple ``(texp, e1, ..., er)``: slot 0 is
the exponent of the auxiliary prime-power variable, the rest are the
exponents of the r main variables.  Keys are packed into a single integer,
12 bits per slot (slot i occupies bits [12*i, 12*i+12)), each slot biased by
2048 so exponents in [-2047, 2047] are representable.  Packing makes a
monomial shift a single integer addition.

Boundary packing is range-checked; interior arithmetic relies on the
documented contract that every slot of every intermediate result stays
within [-2047, 2047] (the library's uses keep exponents well inside that).

All kernel functions are pure (no aliasing of inputs) except
:func:`axpy_terms`, which accumulates in place into its first argument.

``wmds._kernel`` is the compiled twin of this module; both must stay
behaviourally identical (see tests/test_kernel_parity.py).
"""

BACKEND = "py"

SLOT_BITS = 12
SLOT_BIAS = 2048
SLOT_MASK = (1 << SLOT_BITS) - 1
EXP_MAX = SLOT_BIAS - 1

_ZERO_KEYS: dict = {}


def zero_key(nslots):
    """Packed form of the all-zero exponent tuple with ``nslots`` slots."""
    zk = _ZERO_KEYS.get(nslots)
    if zk is None:
        zk = 0
        for i in range(nslots):
            zk |= SLOT_BIAS << (SLOT_BITS * i)
        _ZERO_KEYS[nslots] = zk
    return zk


def pack_key(exps):
    """Pack an exponent tuple; raises ValueError when out of slot range."""
    pk = 0
    for i, e in enumerate(exps):
        if e > EXP_MAX or e < -EXP_MAX:
            raise ValueError(f"exponent {e} outside kernel slot range +-{EXP_MAX}")
        pk |= (e + SLOT_BIAS) << (SLOT_BITS * i)
    return pk


def unpack_key(pk, nslots):
    """Inverse of :func:`pack_key` for a key with ``nslots`` slots."""
    out = []
    for _ in range(nslots):
        out.append((pk & SLOT_MASK) - SLOT_BIAS)
        pk >>= SLOT_BITS
    return tuple(out)


def axpy_terms(acc, src, delta, coef, nslots):
    """acc += coef * monomial(delta) * src, in place.  Returns acc.

    ``delta`` is a bias-free packed shift: pack_key(shift) - zero_key(n),
    so 0 means no shift.
    """
    if coef == 0:
        return acc
    if delta:
        for key, c in src.items():
            nk = key + delta
            nc = acc.get(nk, 0) + coef * c
            if nc:
                acc[nk] = nc
            else:
                del acc[nk]
    else:
        for key, c in src.items():
            nc = acc.get(key, 0) + coef * c
            if nc:
                acc[key] = nc
            else:
                del acc[key]
    return acc


def mul_terms(a, b, nslots):
    """Product of two term maps over the same slot count."""
    if len(a) > len(b):
        a, b = b, a
    zkey = zero_key(nslots)
    out = {}
    for key, c in a.items():
        axpy_terms(out, b, key - zkey, c, nslots)
    return out


def substitute_terms(a, deltas, flips, nslots):
    """Monomial substitution.

    ``deltas[i]`` is the bias-free packed image key of slot i's variable
    (slot 0, the t variable, normally maps to itself: delta 1); ``flips[i]``
    is 1 when that variable also picks up a sign, else 0.
    """
    zk = zero_key(nslots)
    out = {}
    for pk, c in a.items():
        nk = zk
        flip = 0
        k = pk
        for i in range(nslots):
            e = (k & SLOT_MASK) - SLOT_BIAS
            k >>= SLOT_BITS
            if e:
                nk += e * deltas[i]
                if flips[i]:
                    flip ^= e & 1
        nc = out.get(nk, 0) + (-c if flip else c)
        if nc:
            out[nk] = nc
        else:
            del out[nk]
    return out


def divide_binomial_terms(a, uslots, ucoef, nslots):
    """Exact division by (1 - ucoef * monomial(uslots)).

    Returns the quotient term map, or None if the division is not exact.
    ``uslots`` is the divisor monomial as an exponent tuple; it must have a
    nonnegative, nonzero x-part, or a zero x-part and a positive t-part (the
    caller's binomial invariant).

    Grade every key by g(key) = <key, uslots>.  Multiplication by the
    divisor monomial raises g by exactly G = <uslots, uslots> > 0, so the
    quotient recurrence Q_g = A_g + ucoef * shift(Q_{g-G}) runs independently
    along each residue class of g mod G, and the division is exact iff every
    chain ends with zero carry after its last dividend slice.
    """
    if not a:
        return {}
    nz = [(i, v) for i, v in enumerate(uslots) if v]
    G = 0
    udelta = 0
    for i, v in nz:
        G += v * v
        udelta += v << (SLOT_BITS * i)
    # Pass 1 — cheap necessary test.  Stream once, collecting per-grade
    # coefficient sums (a grade determines its residue class, so one flat
    # dict suffices), then run the quotient recurrence on the sums.  Most
    # inexact divisions are rejected here without building any slices.
    gsum: dict = {}
    for pk, c in a.items():
        g = 0
        for i, v in nz:
            g += (((pk >> (SLOT_BITS * i)) & SLOT_MASK) - SLOT_BIAS) * v
        gsum[g] = gsum.get(g, 0) + c
    classes = {}
    for g in gsum:
        cl = classes.get(g % G)
        if cl is None:
            cl = classes[g % G] = []
        cl.append(g)
    for grades in classes.values():
        grades.sort()
        t = 0
        prev = 0
        for g in grades:
            if t and ucoef != 1:
                t *= ucoef ** ((g - prev) // G)
            t += gsum[g]
            prev = g
        if t:
            return None
    # Pass 2 — the division looks exact; build the per-grade slices and run
    # the chain recurrence for real.
    slices: dict = {g: {} for g in gsum}
    for pk, c in a.items():
        g = 0
        for i, v in nz:
            g += (((pk >> (SLOT_BITS * i)) & SLOT_MASK) - SLOT_BIAS) * v
        slices[g][pk] = c
    out = {}
    for grades in classes.values():
        carry = {}
        prev = 0
        last = grades[-1]
        for g in grades:
            if carry:
                # Advance the carry up the chain; every landing short of g is
                # a quotient slice in a grade with no dividend terms.
                for step in range((g - prev) // G):
                    nxt = {}
                    if ucoef == 1:
                        for key, c in carry.items():
                            nxt[key + udelta] = c
                    else:
                        for key, c in carry.items():
                            nxt[key + udelta] = ucoef * c
                    carry = nxt
                    if step:
                        out.update(prev_slice)
                    prev_slice = carry
                for key, c in slices[g].items():
                    ncv = carry.get(key, 0) + c
                    if ncv:
                        carry[key] = ncv
                    elif key in carry:
                        del carry[key]
            else:
                carry = dict(slices[g])
            prev = g
            if g != last:
                out.update(carry)
            elif carry:
                return None
    return out


def eval_zero_terms(a, slots, nslots):
    """Set the variables in the given slots to zero.

    Raises ValueError if a listed slot occurs with negative exponent.
    """
    out = {}
    for pk, c in a.items():
        keep = True
        for i in slots:
            e = ((pk >> (SLOT_BITS * i)) & SLOT_MASK) - SLOT_BIAS
            if e < 0:
                raise ValueError(f"negative exponent {e} in slot {i} at zero")
            if e > 0:
                keep = False
        if keep:
            out[pk] = c
    return out
