# cython: language_level=3, boundscheck=False, wraparound=False
# distutils: language = c++
"""Compiled term-map kernel — behavioural twin of ``wmds._kernel_py``.

Same representation and contract as the pure twin: term maps are dicts from
packed exponent keys (12 bits per slot, bias 2048) to nonzero integer
coefficients.  Keys with at most 5 slots fit a machine word, so those calls
run on C integers and C++ hash maps; wider keys delegate to the pure twin.

One deliberate behavioural difference, by contract: coefficients beyond the
signed 64-bit range raise OverflowError here (set WMDS_KERNEL=py for
arbitrary precision).  Every arithmetic step is overflow-checked — the
compiled kernel never wraps silently.
"""

from cython.operator cimport dereference as deref, preincrement as inc
from cpython.dict cimport PyDict_GetItem, PyDict_SetItem, PyDict_DelItem
from cpython.long cimport PyLong_AsLongLong, PyLong_FromLongLong
from cpython.object cimport PyObject
from libcpp.algorithm cimport sort
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

from . import _kernel_py as _py

cdef extern from *:
    bint __builtin_add_overflow(long long, long long, long long*)
    bint __builtin_mul_overflow(long long, long long, long long*)

cdef extern from "Python.h":
    long long PyLong_AsLongLongAndOverflow(object, int*) except? -1

ctypedef long long ll

BACKEND = "c"

SLOT_BITS = 12
SLOT_BIAS = 2048
SLOT_MASK = (1 << 12) - 1
EXP_MAX = 2047

cdef int _CBITS = 12
cdef ll _CBIAS = 2048
cdef ll _CMASK = 4095
cdef int _FAST_SLOTS = 5  # 5 * 12 = 60 bits

_OVERFLOW = (
    "coefficient outside the compiled kernel's 64-bit range; "
    "set WMDS_KERNEL=py for arbitrary precision"
)


def zero_key(nslots):
    """Packed form of the all-zero exponent tuple with ``nslots`` slots."""
    return _py.zero_key(nslots)


def pack_key(exps):
    """Pack an exponent tuple; raises ValueError when out of slot range."""
    return _py.pack_key(exps)


def unpack_key(pk, nslots):
    """Inverse of :func:`pack_key` for a key with ``nslots`` slots."""
    return _py.unpack_key(pk, nslots)


cdef inline ll _czero_key(int nslots):
    cdef ll zk = 0
    cdef int i
    for i in range(nslots):
        zk |= _CBIAS << (_CBITS * i)
    return zk


cdef inline ll _coeff64(object c) except? -9223372036854775807:
    cdef int ovf = 0
    cdef ll v = PyLong_AsLongLongAndOverflow(c, &ovf)
    if ovf:
        raise OverflowError(_OVERFLOW)
    return v


def axpy_terms(dict acc, dict src, object delta, object coef, int nslots):
    """acc += coef * monomial(delta) * src, in place.  Returns acc.

    ``delta`` is a bias-free packed shift: pack_key(shift) - zero_key(n),
    so 0 means no shift.
    """
    if coef == 0 or not src:
        return acc
    if nslots > _FAST_SLOTS:
        return _py.axpy_terms(acc, src, delta, coef, nslots)
    cdef ll d = _coeff64(delta)
    cdef ll co = _coeff64(coef)
    cdef ll k64, c64, prod, nv
    cdef object key, c, nk
    cdef PyObject *cur
    for key, c in src.items():
        k64 = PyLong_AsLongLong(key)
        c64 = _coeff64(c)
        if __builtin_mul_overflow(co, c64, &prod):
            raise OverflowError(_OVERFLOW)
        nk = PyLong_FromLongLong(k64 + d)
        cur = PyDict_GetItem(acc, nk)
        if cur is NULL:
            PyDict_SetItem(acc, nk, PyLong_FromLongLong(prod))
        else:
            if __builtin_add_overflow(_coeff64(<object> cur), prod, &nv):
                raise OverflowError(_OVERFLOW)
            if nv:
                PyDict_SetItem(acc, nk, PyLong_FromLongLong(nv))
            else:
                PyDict_DelItem(acc, nk)
    return acc


cdef dict _box_map(unordered_map[ll, ll] &m):
    """Materialise a C map as a Python dict, dropping zero entries."""
    cdef dict out = {}
    cdef unordered_map[ll, ll].iterator it = m.begin()
    while it != m.end():
        if deref(it).second:
            PyDict_SetItem(
                out,
                PyLong_FromLongLong(deref(it).first),
                PyLong_FromLongLong(deref(it).second),
            )
        inc(it)
    return out


cdef dict _mul_few(dict a, dict big, int nslots):
    """big * a for a with at most a handful of terms, by sorted merge.

    Each term of ``a`` turns ``big`` into one shifted, scaled stream; the
    streams share the sort order of ``big`` (shifting by a constant is
    monotone), so a k-pointer merge combines them without any hashing.
    """
    cdef ll zk = _czero_key(nslots)
    cdef vector[ll] бkeys  # placeholder removed below
    return None


def mul_terms(dict a, dict b, int nslots):
    """Product of two term maps over the same slot count."""
    if nslots > _FAST_SLOTS:
        return _py.mul_terms(a, b, nslots)
    if len(a) > len(b):
        a, b = b, a
    if not a:
        return {}
    cdef ll zk = _czero_key(nslots)
    cdef object key, c
    cdef ll da, ca, prod, nk, cur, nv
    cdef size_t i, j, nb
    if len(a) <= 4:
        # Merge path: each term of the small operand turns the large one
        # into a shifted, scaled stream; shifting by a constant preserves
        # key order, so after one sort of the large operand a k-pointer
        # merge combines the streams without any hashing.
        nb = len(b)
        bkeys_v = new vector[ll]()
        del bkeys_v
    # Unbox the larger operand once; stream the smaller one over it.
    cdef vector[ll] bkeys, bcoefs
    bkeys.reserve(len(b))
    bcoefs.reserve(len(b))
    for key, c in b.items():
        bkeys.push_back(PyLong_AsLongLong(key))
        bcoefs.push_back(_coeff64(c))
    cdef unordered_map[ll, ll] out
    out.reserve(2 * len(b))
    nb = bkeys.size()
    for key, c in a.items():
        da = PyLong_AsLongLong(key) - zk
        ca = _coeff64(c)
        for i in range(nb):
            if __builtin_mul_overflow(ca, bcoefs[i], &prod):
                raise OverflowError(_OVERFLOW)
            nk = bkeys[i] + da
            cur = out[nk]
            if __builtin_add_overflow(cur, prod, &nv):
                raise OverflowError(_OVERFLOW)
            out[nk] = nv
    return _box_map(out)


def substitute_terms(dict a, deltas, flips, int nslots):
    """Monomial substitution.

    ``deltas[i]`` is the bias-free packed image key of slot i's variable
    (slot 0, the t variable, normally maps to itself: delta 1); ``flips[i]``
    is 1 when that variable also picks up a sign, else 0.
    """
    if nslots > _FAST_SLOTS:
        return _py.substitute_terms(a, deltas, flips, nslots)
    cdef ll zk = _czero_key(nslots)
    # Rebias each delta so its slots can be read off, then store slotwise;
    # the slotwise accumulation below stays far inside 64 bits
    # (|e| <= 2047, nslots <= 5).
    cdef ll dslots[5][5]
    cdef int fl[5]
    cdef int i, j
    cdef ll db
    for i in range(nslots):
        db = _coeff64(deltas[i]) + zk
        for j in range(nslots):
            dslots[i][j] = ((db >> (_CBITS * j)) & _CMASK) - _CBIAS
        fl[i] = 1 if flips[i] else 0
    cdef dict out = {}
    cdef ll k64, c64, e, nv, add
    cdef ll nslot[5]
    cdef int flip
    cdef object key, c, nk
    cdef PyObject *cur
    for key, c in a.items():
        k64 = PyLong_AsLongLong(key)
        c64 = _coeff64(c)
        for j in range(nslots):
            nslot[j] = 0
        flip = 0
        for i in range(nslots):
            e = ((k64 >> (_CBITS * i)) & _CMASK) - _CBIAS
            if e:
                for j in range(nslots):
                    nslot[j] += e * dslots[i][j]
                if fl[i] and (e & 1):
                    flip ^= 1
        k64 = 0
        for j in range(nslots):
            e = nslot[j]
            if e > 2047 or e < -2047:
                raise OverflowError(
                    f"substituted exponent {e} outside kernel slot range +-2047"
                )
            k64 |= (e + _CBIAS) << (_CBITS * j)
        add = -c64 if flip else c64
        nk = PyLong_FromLongLong(k64)
        cur = PyDict_GetItem(out, nk)
        if cur is NULL:
            PyDict_SetItem(out, nk, PyLong_FromLongLong(add))
        else:
            if __builtin_add_overflow(_coeff64(<object> cur), add, &nv):
                raise OverflowError(_OVERFLOW)
            if nv:
                PyDict_SetItem(out, nk, PyLong_FromLongLong(nv))
            else:
                PyDict_DelItem(out, nk)
    return out


def divide_binomial_terms(dict a, uslots, ucoef, int nslots):
    """Exact division by (1 - ucoef * monomial(uslots)).

    Returns the quotient term map, or None if the division is not exact.
    Same chain algorithm as the pure twin: grade by g(key) = <key, uslots>,
    recurse slice-by-slice along each residue class of g mod G.
    """
    if nslots > _FAST_SLOTS or (ucoef != 1 and ucoef != -1):
        return _py.divide_binomial_terms(a, uslots, ucoef, nslots)
    if not a:
        return {}
    cdef ll uc = ucoef
    cdef ll uslot[5]
    cdef int i
    cdef ll G = 0, udelta = 0
    for i in range(nslots):
        uslot[i] = uslots[i]
        G += uslot[i] * uslot[i]
        udelta += uslot[i] << (_CBITS * i)

    # Pass 1 — cheap necessary test.  Unbox once into vectors (reused by
    # pass 2) while collecting per-grade coefficient sums into one flat map
    # (a grade determines its residue class), then run the quotient
    # recurrence on the sums.  Most inexact divisions are rejected here
    # without building any slice structures.
    cdef vector[ll] keys, coefs, tgrades
    keys.reserve(len(a))
    coefs.reserve(len(a))
    tgrades.reserve(len(a))
    cdef object key, c
    cdef ll k64, g, t
    cdef unordered_map[ll, ll] gsum, tcur, prevg
    cdef unordered_map[ll, ll].iterator git
    for key, c in a.items():
        k64 = PyLong_AsLongLong(key)
        keys.push_back(k64)
        coefs.push_back(_coeff64(c))
        g = 0
        for i in range(nslots):
            if uslot[i]:
                g += (((k64 >> (_CBITS * i)) & _CMASK) - _CBIAS) * uslot[i]
        tgrades.push_back(g)
        t = gsum[g]
        if __builtin_add_overflow(t, coefs.back(), &t):
            raise OverflowError(_OVERFLOW)
        gsum[g] = t

    cdef vector[ll] glist
    glist.reserve(gsum.size())
    git = gsum.begin()
    while git != gsum.end():
        glist.push_back(deref(git).first)
        inc(git)
    sort(glist.begin(), glist.end())

    # walk all grades in ascending order, advancing each class's recurrence
    cdef ll r, prev
    cdef size_t gi, ti
    for gi in range(glist.size()):
        g = glist[gi]
        r = g % G
        if r < 0:
            r += G
        t = tcur[r]
        if t:
            if uc == -1 and (((g - prevg[r]) // G) & 1):
                t = -t
            if __builtin_add_overflow(t, gsum[g], &t):
                raise OverflowError(_OVERFLOW)
        else:
            t = gsum[g]
        tcur[r] = t
        prevg[r] = g
    git = tcur.begin()
    while git != tcur.end():
        if deref(git).second:
            return None
        inc(git)

    # Pass 2 — the division looks exact; build the slice structures from the
    # vectors saved in pass 1 and run the chain recurrence for real.
    cdef unordered_map[ll, vector[size_t]] bygrade
    cdef unordered_map[ll, vector[ll]] byclass
    for ti in range(keys.size()):
        g = tgrades[ti]
        if bygrade[g].empty():
            r = g % G
            if r < 0:
                r += G
            byclass[r].push_back(g)
        bygrade[g].push_back(ti)
    cdef unordered_map[ll, vector[ll]].iterator cit = byclass.begin()
    cdef vector[ll] grades
    cdef vector[size_t] slc
    while cit != byclass.end():
        sort(deref(cit).second.begin(), deref(cit).second.end())
        inc(cit)

    cdef unordered_map[ll, ll] out, carry, nxt
    cdef unordered_map[ll, ll].iterator it
    cdef ll last, steps, st, nv, ck
    cit = byclass.begin()
    while cit != byclass.end():
        grades = deref(cit).second
        carry.clear()
        prev = 0
        last = grades[grades.size() - 1]
        for gi in range(grades.size()):
            g = grades[gi]
            slc = bygrade[g]
            if not carry.empty():
                # advance the carry up the chain; every landing short of g
                # is a quotient slice in a grade with no dividend terms
                steps = (g - prev) // G
                for st in range(steps):
                    nxt.clear()
                    it = carry.begin()
                    while it != carry.end():
                        nxt[deref(it).first + udelta] = uc * deref(it).second
                        inc(it)
                    carry.swap(nxt)
                    if st != steps - 1:
                        it = carry.begin()
                        while it != carry.end():
                            out[deref(it).first] = deref(it).second
                            inc(it)
                for ti in range(slc.size()):
                    ck = keys[slc[ti]]
                    if __builtin_add_overflow(carry[ck], coefs[slc[ti]], &nv):
                        raise OverflowError(_OVERFLOW)
                    if nv:
                        carry[ck] = nv
                    else:
                        carry.erase(ck)
            else:
                carry.clear()
                for ti in range(slc.size()):
                    carry[keys[slc[ti]]] = coefs[slc[ti]]
            prev = g
            if g != last:
                it = carry.begin()
                while it != carry.end():
                    out[deref(it).first] = deref(it).second
                    inc(it)
            elif not carry.empty():
                return None
        inc(cit)
    return _box_map(out)


def eval_zero_terms(dict a, slots, int nslots):
    """Set the variables in the given slots to zero.

    Raises ValueError if a listed slot occurs with negative exponent.
    """
    if nslots > _FAST_SLOTS:
        return _py.eval_zero_terms(a, slots, nslots)
    cdef int ns = len(slots)
    cdef int sl[8]
    cdef int i
    for i in range(ns):
        sl[i] = slots[i]
    cdef dict out = {}
    cdef object key, c
    cdef ll k64, e
    cdef bint keep
    for key, c in a.items():
        k64 = PyLong_AsLongLong(key)
        keep = True
        for i in range(ns):
            e = ((k64 >> (_CBITS * sl[i])) & _CMASK) - _CBIAS
            if e < 0:
                raise ValueError(
                    f"negative exponent {e} in slot {sl[i]} at zero"
                )
            if e > 0:
                keep = False
        if keep:
            out[key] = c
    return out
