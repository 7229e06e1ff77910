# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel lane.

Mirrors the pure-Python lane function for function over the same packed
argument tuples; see that module's docstring for the pack layouts.  The
hot loops (bit probes, rank/select, tree walks, Rice coding) run as C
code; setup and teardown that is already array-at-a-time numpy work is
kept as such.
"""

import numpy as np

cimport cython
from libc.stdint cimport int64_t, uint8_t, uint32_t, uint64_t

cdef extern from *:
    int __builtin_popcountll(unsigned long long x)
    int __builtin_ctzll(unsigned long long x)

OP_UNION, OP_INTER, OP_DIFF, OP_SYMDIFF = 0, 1, 2, 3

cdef int C_UNION = 0, C_INTER = 1, C_DIFF = 2, C_SYMDIFF = 3

_EMPTY_U64 = np.zeros(0, np.uint64)


cdef inline int _bit(const uint64_t[::1] words, int64_t pos) noexcept:
    return <int>((words[pos >> 6] >> (pos & 63)) & 1)


cdef inline uint64_t _lowmask(int width) noexcept:
    if width >= 64:
        return <uint64_t>0 - 1
    return (<uint64_t>1 << width) - 1


@cython.final
cdef class _U32Buf:
    """Growable uint32 output buffer."""

    cdef object arr
    cdef uint32_t[::1] view
    cdef Py_ssize_t n

    def __cinit__(self, Py_ssize_t cap=64):
        if cap < 16:
            cap = 16
        self.arr = np.empty(cap, np.uint32)
        self.view = self.arr
        self.n = 0

    cdef inline void push(self, uint32_t v):
        if self.n == self.view.shape[0]:
            self.arr = np.concatenate([self.arr, np.empty(self.view.shape[0], np.uint32)])
            self.view = self.arr
        self.view[self.n] = v
        self.n += 1

    cdef object take(self):
        return np.asarray(self.arr[:self.n]).copy()


# ---------------------------------------------------------------- bitvec

cdef int64_t _rank1(const uint64_t[::1] words, const uint32_t[::1] blocks,
                    int64_t i) noexcept:
    cdef int64_t w = i >> 6
    cdef int64_t r = 0
    cdef int64_t start = 0
    cdef int64_t b, j
    cdef int rem
    if blocks.shape[0]:
        b = w >> 3
        if b > blocks.shape[0] - 1:
            b = blocks.shape[0] - 1
        r = blocks[b]
        start = b << 3
    for j in range(start, w):
        r += __builtin_popcountll(words[j])
    rem = i & 63
    if rem:
        r += __builtin_popcountll(words[w] & _lowmask(rem))
    return r


cdef int64_t _select1(const uint64_t[::1] words, const uint32_t[::1] blocks,
                      int64_t j) noexcept:
    cdef int64_t r = 0
    cdef int64_t w = 0
    cdef int64_t lo, hi, mid
    cdef int c
    cdef uint64_t word
    if blocks.shape[0]:
        lo = 0
        hi = blocks.shape[0] - 1
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if <int64_t>blocks[mid] <= j:
                lo = mid
            else:
                hi = mid - 1
        r = blocks[lo]
        w = lo << 3
    while True:
        c = __builtin_popcountll(words[w])
        if r + c > j:
            break
        r += c
        w += 1
    word = words[w]
    cdef int64_t need = j - r
    cdef int tz
    while True:
        tz = __builtin_ctzll(word)
        if need == 0:
            return (w << 6) + tz
        need -= 1
        word &= word - 1


def bv_rank1(words, blocks, i):
    return _rank1(words, blocks, i)


def bv_select1(words, blocks, j):
    # caller guarantees a j-th one exists
    return _select1(words, blocks, j)


# ---------------------------------------------------------------- k2

@cython.final
cdef class _K2P:
    """Typed view over one quadtree pack tuple."""

    cdef const uint64_t[::1] tw
    cdef const uint32_t[::1] tb
    cdef const uint64_t[::1] lw
    cdef const uint64_t[::1] uw
    cdef const int64_t[::1] t_off
    cdef const int64_t[::1] u_off
    cdef bint has_u
    cdef int64_t tn, ln
    cdef int height
    cdef int64_t npad

    def __cinit__(self, k):
        self.tw = k[0]
        self.tb = k[1]
        self.tn = k[2]
        self.lw = k[3]
        self.ln = k[4]
        self.has_u = k[5] is not None
        self.uw = k[5] if self.has_u else _EMPTY_U64
        self.height = k[7]
        self.npad = k[8]
        self.t_off = k[9]
        if self.has_u:
            self.u_off = k[10]


def k2_is_related(k, x, y):
    cdef _K2P p = _K2P(k)
    cdef int64_t cx = x, cy = y
    cdef int s = p.height - 1
    cdef int64_t pos = (((cx >> s) & 1) << 1) | ((cy >> s) & 1)
    cdef int64_t base
    cdef int lv
    for lv in range(1, p.height):
        if not _bit(p.tw, pos):
            if not p.has_u:
                return False
            return _bit(p.uw, pos - _rank1(p.tw, p.tb, pos)) == 1
        base = _rank1(p.tw, p.tb, pos + 1) << 2
        s -= 1
        pos = base + ((((cx >> s) & 1) << 1) | ((cy >> s) & 1))
    return _bit(p.lw, pos - p.tn) == 1


def k2_successors(k, x):
    cdef _K2P p = _K2P(k)
    cdef _U32Buf out = _U32Buf()
    cdef int64_t cx = x
    cdef int64_t half = p.npad >> 1
    cdef int xb = <int>((cx >> (p.height - 1)) & 1)
    cdef int64_t spos[264]
    cdef int slev[264]
    cdef int64_t scol[264]
    cdef Py_ssize_t top = 0
    spos[0] = (xb << 1) | 1; slev[0] = 1; scol[0] = half
    spos[1] = xb << 1; slev[1] = 1; scol[1] = 0
    top = 2
    cdef int64_t pos, col0, base, h2, c
    cdef int level, xb2
    while top:
        top -= 1
        pos = spos[top]; level = slev[top]; col0 = scol[top]
        if level == p.height:
            if _bit(p.lw, pos - p.tn):
                out.push(<uint32_t>col0)
            continue
        if not _bit(p.tw, pos):
            if p.has_u and _bit(p.uw, pos - _rank1(p.tw, p.tb, pos)):
                for c in range(col0, col0 + (p.npad >> level)):
                    out.push(<uint32_t>c)
            continue
        base = _rank1(p.tw, p.tb, pos + 1) << 2
        xb2 = <int>((cx >> (p.height - level - 1)) & 1)
        h2 = p.npad >> (level + 1)
        spos[top] = base + (xb2 << 1) + 1; slev[top] = level + 1; scol[top] = col0 + h2
        top += 1
        spos[top] = base + (xb2 << 1); slev[top] = level + 1; scol[top] = col0
        top += 1
    return out.take()


def k2_predecessors(k, y):
    cdef _K2P p = _K2P(k)
    cdef _U32Buf out = _U32Buf()
    cdef int64_t cy = y
    cdef int64_t half = p.npad >> 1
    cdef int yb = <int>((cy >> (p.height - 1)) & 1)
    cdef int64_t spos[264]
    cdef int slev[264]
    cdef int64_t srow[264]
    cdef Py_ssize_t top = 0
    spos[0] = 2 | yb; slev[0] = 1; srow[0] = half
    spos[1] = yb; slev[1] = 1; srow[1] = 0
    top = 2
    cdef int64_t pos, row0, base, h2, r
    cdef int level, yb2
    while top:
        top -= 1
        pos = spos[top]; level = slev[top]; row0 = srow[top]
        if level == p.height:
            if _bit(p.lw, pos - p.tn):
                out.push(<uint32_t>row0)
            continue
        if not _bit(p.tw, pos):
            if p.has_u and _bit(p.uw, pos - _rank1(p.tw, p.tb, pos)):
                for r in range(row0, row0 + (p.npad >> level)):
                    out.push(<uint32_t>r)
            continue
        base = _rank1(p.tw, p.tb, pos + 1) << 2
        yb2 = <int>((cy >> (p.height - level - 1)) & 1)
        h2 = p.npad >> (level + 1)
        spos[top] = base + 2 + yb2; slev[top] = level + 1; srow[top] = row0 + h2
        top += 1
        spos[top] = base + yb2; slev[top] = level + 1; srow[top] = row0
        top += 1
    return out.take()


def k2_range(k, x1, y1, x2, y2):
    cdef _K2P p = _K2P(k)
    cdef _U32Buf xs = _U32Buf()
    cdef _U32Buf ys = _U32Buf()
    cdef int64_t cx1 = x1, cy1 = y1, cx2 = x2, cy2 = y2
    cdef int64_t half = p.npad >> 1
    cdef int64_t spos[264]
    cdef int slev[264]
    cdef int64_t sr0[264]
    cdef int64_t sc0[264]
    cdef Py_ssize_t top = 0
    cdef int d
    for d in range(4):
        spos[top] = d; slev[top] = 1
        sr0[top] = (d >> 1) * half; sc0[top] = (d & 1) * half
        top += 1
    cdef int64_t pos, r0, c0, side, base, h2, rr, cc, rlo, rhi, clo, chi
    cdef int level
    while top:
        top -= 1
        pos = spos[top]; level = slev[top]; r0 = sr0[top]; c0 = sc0[top]
        side = p.npad >> level
        if r0 > cx2 or r0 + side - 1 < cx1 or c0 > cy2 or c0 + side - 1 < cy1:
            continue
        if level == p.height:
            if _bit(p.lw, pos - p.tn):
                xs.push(<uint32_t>r0)
                ys.push(<uint32_t>c0)
            continue
        if not _bit(p.tw, pos):
            if p.has_u and _bit(p.uw, pos - _rank1(p.tw, p.tb, pos)):
                rlo = r0 if r0 > cx1 else cx1
                rhi = r0 + side - 1 if r0 + side - 1 < cx2 else cx2
                clo = c0 if c0 > cy1 else cy1
                chi = c0 + side - 1 if c0 + side - 1 < cy2 else cy2
                for rr in range(rlo, rhi + 1):
                    for cc in range(clo, chi + 1):
                        xs.push(<uint32_t>rr)
                        ys.push(<uint32_t>cc)
            continue
        base = _rank1(p.tw, p.tb, pos + 1) << 2
        h2 = side >> 1
        for d in range(4):
            spos[top] = base + d; slev[top] = level + 1
            sr0[top] = r0 + (d >> 1) * h2; sc0[top] = c0 + (d & 1) * h2
            top += 1
    xa = xs.take()
    ya = ys.take()
    if xa.size == 0:
        return np.zeros((0, 2), np.uint32)
    order = np.lexsort((ya, xa))
    return np.stack([xa[order], ya[order]], axis=1)


def k2_union_plain(ka, kb):
    # breadth-first merge: both inputs are read with one running cursor
    # per bitmap because level order equals storage order
    cdef const uint64_t[::1] twa = ka[0]
    cdef int64_t tna = ka[2]
    cdef const uint64_t[::1] lwa = ka[3]
    cdef int64_t lna = ka[4]
    cdef const uint64_t[::1] twb = kb[0]
    cdef int64_t tnb = kb[2]
    cdef const uint64_t[::1] lwb = kb[3]
    cdef int64_t lnb = kb[4]
    cdef int height = ka[7]

    t_arr = np.empty(tna + tnb + 4, np.uint8)
    l_arr = np.empty(lna + lnb + 4, np.uint8)
    cdef uint8_t[::1] t_out = t_arr
    cdef uint8_t[::1] l_out = l_arr
    cdef Py_ssize_t tlen = 0, llen = 0

    cdef Py_ssize_t gcap = <Py_ssize_t>(tna + tnb + 8)
    ga_arr = np.empty(gcap, np.uint8)
    gb_arr = np.empty(gcap, np.uint8)
    na_arr = np.empty(gcap, np.uint8)
    nb_arr = np.empty(gcap, np.uint8)
    cdef uint8_t[::1] ga = ga_arr
    cdef uint8_t[::1] gb = gb_arr
    cdef uint8_t[::1] nxa = na_arr
    cdef uint8_t[::1] nxb = nb_arr
    cdef uint8_t[::1] tmp
    ga[0] = 1
    gb[0] = 1
    cdef Py_ssize_t glen = 1, nlen, gi
    cdef int64_t ca = 0, cb = 0, la = 0, lb = 0
    cdef int level, q, a, b, o, ha, hb
    cdef bint cell
    for level in range(1, height + 1):
        cell = level == height
        nlen = 0
        for gi in range(glen):
            ha = ga[gi]
            hb = gb[gi]
            for q in range(4):
                a = 0
                b = 0
                if ha:
                    if cell:
                        a = _bit(lwa, la); la += 1
                    else:
                        a = _bit(twa, ca); ca += 1
                if hb:
                    if cell:
                        b = _bit(lwb, lb); lb += 1
                    else:
                        b = _bit(twb, cb); cb += 1
                o = a | b
                if cell:
                    l_out[llen] = <uint8_t>o; llen += 1
                else:
                    t_out[tlen] = <uint8_t>o; tlen += 1
                    if o:
                        nxa[nlen] = <uint8_t>a
                        nxb[nlen] = <uint8_t>b
                        nlen += 1
        tmp = ga; ga = nxa; nxa = tmp
        tmp = gb; gb = nxb; nxb = tmp
        glen = nlen
    if ca != tna or cb != tnb or la != lna or lb != lnb:
        raise RuntimeError("k2 union cursor drift")
    return t_arr[:tlen].copy(), l_arr[:llen].copy()


@cython.final
cdef class _K2Setop:
    """Depth-first pairwise merge state; see the pure lane for the
    operation table this mirrors."""

    cdef _K2P a, b
    cdef int op, height
    cdef bint has_u
    # per-level input cursors
    cdef int64_t[::1] cta, ctb, cua, cub
    cdef int64_t cla, clb
    # per-level output buffers, flattened with level base offsets
    cdef uint8_t[::1] tbuf, ubuf
    cdef int64_t[::1] tbase, tlen, ubase, ulen
    cdef uint8_t[::1] lbuf
    cdef int64_t llen

    def __cinit__(self, int op, ka, kb):
        self.op = op
        self.a = _K2P(ka)
        self.b = _K2P(kb)
        self.height = self.a.height
        self.has_u = self.a.has_u
        self.cta = np.asarray(ka[9], np.int64).copy()
        self.ctb = np.asarray(kb[9], np.int64).copy()
        if self.has_u:
            self.cua = np.asarray(ka[10], np.int64).copy()
            self.cub = np.asarray(kb[10], np.int64).copy()
        self.cla = 0
        self.clb = 0
        cdef int h = self.height
        caps = np.zeros(h + 1, np.int64)
        toa = np.asarray(ka[9], np.int64)
        tob = np.asarray(kb[9], np.int64)
        cdef int lv
        for lv in range(1, h):
            caps[lv] = (int(toa[lv + 1]) - int(toa[lv])
                        + int(tob[lv + 1]) - int(tob[lv]) + 4)
        base = np.zeros(h + 1, np.int64)
        np.cumsum(caps[:-1], out=base[1:])
        self.tbase = base
        self.ubase = base.copy()
        self.tbuf = np.zeros(int(base[-1]) + int(caps[-1]), np.uint8)
        self.ubuf = np.zeros(int(base[-1]) + int(caps[-1]), np.uint8)
        self.tlen = np.zeros(h + 1, np.int64)
        self.ulen = np.zeros(h + 1, np.int64)
        self.lbuf = np.zeros(self.a.ln + self.b.ln + 4, np.uint8)
        self.llen = 0

    cdef inline void emit_t(self, int level, int v):
        self.tbuf[self.tbase[level] + self.tlen[level]] = <uint8_t>v
        self.tlen[level] += 1

    cdef inline void emit_u(self, int level, int v):
        self.ubuf[self.ubase[level] + self.ulen[level]] = <uint8_t>v
        self.ulen[level] += 1

    cdef inline void emit_l(self, int v):
        self.lbuf[self.llen] = <uint8_t>v
        self.llen += 1

    cdef inline int read_t(self, bint side_b, int level):
        cdef int v
        if side_b:
            v = _bit(self.b.tw, self.ctb[level])
            self.ctb[level] += 1
        else:
            v = _bit(self.a.tw, self.cta[level])
            self.cta[level] += 1
        return v

    cdef inline int read_u(self, bint side_b, int level):
        cdef int v
        if side_b:
            v = _bit(self.b.uw, self.cub[level])
            self.cub[level] += 1
        else:
            v = _bit(self.a.uw, self.cua[level])
            self.cua[level] += 1
        return v

    cdef inline int read_l(self, bint side_b):
        cdef int v
        if side_b:
            v = _bit(self.b.lw, self.clb)
            self.clb += 1
        else:
            v = _bit(self.a.lw, self.cla)
            self.cla += 1
        return v

    cdef inline int read_state(self, bint side_b, int level):
        # 0 empty block, 1 all-ones block, 2 mixed block
        if self.read_t(side_b, level):
            return 2
        if self.has_u:
            return 1 if self.read_u(side_b, level) else 0
        return 0

    cdef inline int leaf_op(self, int a, int b) noexcept:
        if self.op == C_UNION:
            return a | b
        if self.op == C_INTER:
            return a & b
        if self.op == C_DIFF:
            return a & (1 - b)
        return a ^ b

    cdef void subtree(self, bint side_b, int level, bint emit, int flip):
        # walk one subtree whose four child bits sit at `level`; when
        # emitting, copy bits through (complementing flags/cells on flip)
        cdef int q, v, bflag, u
        cdef int bits4[4]
        if level == self.height:
            for q in range(4):
                v = self.read_l(side_b)
                if emit:
                    self.emit_l(v ^ flip)
            return
        for q in range(4):
            bflag = self.read_t(side_b, level)
            bits4[q] = bflag
            if emit:
                self.emit_t(level, bflag)
            if not bflag and self.has_u:
                u = self.read_u(side_b, level)
                if emit:
                    self.emit_u(level, u ^ flip)
        for q in range(4):
            if bits4[q]:
                self.subtree(side_b, level + 1, emit, flip)

    cdef int combine(self, int sa, int sb, int level):
        if sa == 2 and sb == 2:
            return self.group(level)
        if self.op == C_UNION:
            if sa == 1 or sb == 1:
                if sa == 2:
                    self.subtree(0, level, 0, 0)
                if sb == 2:
                    self.subtree(1, level, 0, 0)
                return 1
            if sa == 2:
                self.subtree(0, level, 1, 0)
                return 2
            if sb == 2:
                self.subtree(1, level, 1, 0)
                return 2
            return 0
        if self.op == C_INTER:
            if sa == 0 or sb == 0:
                if sa == 2:
                    self.subtree(0, level, 0, 0)
                if sb == 2:
                    self.subtree(1, level, 0, 0)
                return 0
            if sa == 2:
                self.subtree(0, level, 1, 0)
                return 2
            if sb == 2:
                self.subtree(1, level, 1, 0)
                return 2
            return 1
        if self.op == C_DIFF:
            if sa == 0:
                if sb == 2:
                    self.subtree(1, level, 0, 0)
                return 0
            if sb == 1:
                if sa == 2:
                    self.subtree(0, level, 0, 0)
                return 0
            if sa == 2:
                self.subtree(0, level, 1, 0)
                return 2
            if sb == 2:
                self.subtree(1, level, 1, 1)
                return 2
            return 1
        # symmetric difference
        if sa == 0:
            if sb == 2:
                self.subtree(1, level, 1, 0)
                return 2
            return sb
        if sb == 0:
            if sa == 2:
                self.subtree(0, level, 1, 0)
                return 2
            return sa
        if sa == 1 and sb == 1:
            return 0
        if sa == 1:
            self.subtree(1, level, 1, 1)
            return 2
        self.subtree(0, level, 1, 1)
        return 2

    cdef int group(self, int level):
        cdef int st[4]
        cdef int a4[4]
        cdef int b4[4]
        cdef int q, s2
        if level == self.height:
            for q in range(4):
                a4[q] = self.read_l(0)
            for q in range(4):
                b4[q] = self.read_l(1)
            for q in range(4):
                st[q] = self.leaf_op(a4[q], b4[q])
        else:
            for q in range(4):
                a4[q] = self.read_state(0, level)
            for q in range(4):
                b4[q] = self.read_state(1, level)
            for q in range(4):
                st[q] = self.combine(a4[q], b4[q], level + 1)
        if st[0] == 0 and st[1] == 0 and st[2] == 0 and st[3] == 0:
            return 0
        if (self.has_u and st[0] == 1 and st[1] == 1
                and st[2] == 1 and st[3] == 1):
            return 1
        if level == self.height:
            for q in range(4):
                self.emit_l(st[q])
        else:
            for q in range(4):
                s2 = st[q]
                if s2 == 2:
                    self.emit_t(level, 1)
                else:
                    self.emit_t(level, 0)
                    if self.has_u:
                        self.emit_u(level, 1 if s2 == 1 else 0)
        return 2


def k2_setop(op, ka, kb):
    """Depth-first merge with per-level cursors; used by every pairwise op
    except the plain-variant union (which stays breadth-first)."""
    cdef _K2Setop s = _K2Setop(op, ka, kb)
    cdef int top = s.group(1)
    cdef int height = s.height
    cdef int lv
    toa = np.asarray(ka[9], np.int64)
    tob = np.asarray(kb[9], np.int64)
    for lv in range(1, height):
        if s.cta[lv] != int(toa[lv + 1]) or s.ctb[lv] != int(tob[lv + 1]):
            raise RuntimeError("k2 setop cursor drift")
    if s.cla != s.a.ln or s.clb != s.b.ln:
        raise RuntimeError("k2 setop leaf cursor drift")

    tb_arr = np.asarray(s.tbuf)
    ub_arr = np.asarray(s.ubuf)
    if top == 2:
        t_parts = [tb_arr[int(s.tbase[lv]):int(s.tbase[lv]) + int(s.tlen[lv])]
                   for lv in range(1, height)]
        t_bits = (np.concatenate(t_parts) if height > 1
                  else np.zeros(0, np.uint8))
        l_bits = np.asarray(s.lbuf[:s.llen]).copy()
        if s.has_u:
            u_parts = [ub_arr[int(s.ubase[lv]):int(s.ubase[lv]) + int(s.ulen[lv])]
                       for lv in range(1, height)]
            u_bits = np.concatenate(u_parts)
        else:
            u_bits = None
    else:
        t_bits = np.zeros(4, np.uint8)
        l_bits = np.zeros(0, np.uint8)
        u_bits = (np.full(4, 1 if top == 1 else 0, np.uint8)
                  if s.has_u else None)
    return t_bits, l_bits, u_bits


# ---------------------------------------------------------------- brwt

@cython.final
cdef class _BwP:
    """Typed view over one row-bisection-tree pack tuple."""

    cdef const uint64_t[::1] fw
    cdef const uint32_t[::1] fb
    cdef const int64_t[::1] lw_off, lb_off, offs, w_off, o_off
    cdef const uint32_t[::1] widths
    cdef int nlev
    cdef int64_t n, n_rows
    cdef int h

    def __cinit__(self, P):
        self.fw = P[0]
        self.fb = P[1]
        self.lw_off = P[2]
        self.lb_off = P[3]
        self.widths = P[5]
        self.w_off = P[6]
        self.offs = P[7]
        self.o_off = P[8]
        self.nlev = P[9]
        self.n = P[10]
        self.n_rows = P[11]
        self.h = P[12]

    cdef inline int bit(self, int lv, int64_t pos) noexcept:
        cdef int64_t base = self.lw_off[lv]
        return <int>((self.fw[base + (pos >> 6)] >> (pos & 63)) & 1)

    cdef inline int64_t rank(self, int lv, int64_t pos) noexcept:
        cdef int64_t wbase = self.lw_off[lv]
        cdef int64_t bbase = self.lb_off[lv]
        cdef int64_t nb = self.lb_off[lv + 1] - bbase
        cdef int64_t w = pos >> 6
        cdef int64_t r = 0
        cdef int64_t start = 0
        cdef int64_t b, j
        cdef int rem
        if nb:
            b = w >> 3
            if b > nb - 1:
                b = nb - 1
            r = self.fb[bbase + b]
            start = b << 3
        for j in range(start, w):
            r += __builtin_popcountll(self.fw[wbase + j])
        rem = pos & 63
        if rem:
            r += __builtin_popcountll(self.fw[wbase + w] & _lowmask(rem))
        return r

    cdef inline int64_t width(self, int lv, int64_t t) noexcept:
        return self.widths[self.w_off[lv] + t]

    cdef inline int64_t off(self, int lv, int64_t t) noexcept:
        return self.offs[self.o_off[lv] + t]


def brwt_is_related(P, x, y):
    cdef _BwP p = _BwP(P)
    cdef int64_t cx = x
    cdef int64_t j = y
    cdef int lv
    cdef int64_t t, off, w, s
    for lv in range(p.nlev):
        t = cx >> (p.h - lv)
        off = p.off(lv, t)
        w = p.width(lv, t)
        s = off + ((cx >> (p.h - lv - 1)) & 1) * w
        if not p.bit(lv, s + j):
            return False
        if lv == p.nlev - 1:
            return True
        j = p.rank(lv, s + j) - p.rank(lv, s)
    return False


cdef inline Py_ssize_t _scan_half(_BwP p, int lv, int64_t s, int64_t w,
                                  uint32_t[::1] ids, Py_ssize_t cnt,
                                  bint root) noexcept:
    """Filter the id list by the set bits of the half-row [s, s+w);
    at the root the ids are the bit positions themselves."""
    cdef Py_ssize_t out = 0
    cdef int64_t pos = s, stop = s + w, base = p.lw_off[lv]
    cdef int64_t wi, avail, i
    cdef int bi, tz
    cdef uint64_t chunk
    while pos < stop:
        wi = base + (pos >> 6)
        bi = pos & 63
        avail = 64 - bi
        if avail > stop - pos:
            avail = stop - pos
        chunk = (p.fw[wi] >> bi) & _lowmask(<int>avail)
        while chunk:
            tz = __builtin_ctzll(chunk)
            i = pos + tz - s
            if root:
                ids[out] = <uint32_t>i
            else:
                ids[out] = ids[i]
            out += 1
            chunk &= chunk - 1
        pos += avail
    return out


def brwt_successors(P, x):
    cdef _BwP p = _BwP(P)
    cdef int64_t cx = x
    ids_arr = np.empty(p.n, np.uint32)
    cdef uint32_t[::1] ids = ids_arr
    cdef Py_ssize_t cnt = 0
    cdef int lv
    cdef int64_t t, off, w, s
    for lv in range(p.nlev):
        t = cx >> (p.h - lv)
        off = p.off(lv, t)
        w = p.width(lv, t)
        if w == 0:
            return np.zeros(0, np.uint32)
        s = off + ((cx >> (p.h - lv - 1)) & 1) * w
        cnt = _scan_half(p, lv, s, w, ids, cnt, lv == 0)
        if cnt == 0:
            return np.zeros(0, np.uint32)
    return ids_arr[:cnt].copy()


cdef void _pred_rec(_BwP p, int lv, int64_t t, int64_t j,
                    uint32_t[::1] out, Py_ssize_t* cnt) noexcept:
    cdef int64_t off = p.off(lv, t)
    cdef int64_t w = p.width(lv, t)
    cdef int bl = p.bit(lv, off + j)
    cdef int br = p.bit(lv, off + w + j)
    cdef bint leaf = lv == p.nlev - 1
    if bl:
        if leaf:
            out[cnt[0]] = <uint32_t>(2 * t)
            cnt[0] += 1
        else:
            _pred_rec(p, lv + 1, 2 * t,
                      p.rank(lv, off + j) - p.rank(lv, off), out, cnt)
    if br:
        if leaf:
            out[cnt[0]] = <uint32_t>(2 * t + 1)
            cnt[0] += 1
        else:
            _pred_rec(p, lv + 1, 2 * t + 1,
                      p.rank(lv, off + w + j) - p.rank(lv, off + w), out, cnt)


def brwt_predecessors(P, y):
    cdef _BwP p = _BwP(P)
    out_arr = np.empty(p.n_rows, np.uint32)
    cdef uint32_t[::1] out = out_arr
    cdef Py_ssize_t cnt = 0
    _pred_rec(p, 0, 0, y, out, &cnt)
    return out_arr[:cnt].copy()


cdef void _brange_rec(_BwP p, int lv, int64_t t, int64_t j0,
                      uint32_t[::1] ids, Py_ssize_t ids_len,
                      int64_t x1, int64_t x2,
                      uint32_t[::1] scratch, Py_ssize_t swidth,
                      _U32Buf xs, _U32Buf ys):
    cdef int64_t rows0 = t << (p.h - lv)
    if rows0 > x2 or rows0 + ((<int64_t>1) << (p.h - lv)) - 1 < x1:
        return
    cdef int64_t off = p.off(lv, t)
    cdef int64_t w = p.width(lv, t)
    cdef bint leaf = lv == p.nlev - 1
    cdef int side
    cdef int64_t s, row, cj
    cdef Py_ssize_t i, kept
    cdef uint32_t[::1] sub
    for side in range(2):
        s = off + side * w
        kept = 0
        sub = scratch[(lv + 1) * swidth:(lv + 2) * swidth]
        for i in range(ids_len):
            if p.bit(lv, s + j0 + i):
                sub[kept] = ids[i]
                kept += 1
        if kept == 0:
            continue
        if leaf:
            row = 2 * t + side
            if x1 <= row <= x2:
                for i in range(kept):
                    xs.push(<uint32_t>row)
                    ys.push(sub[i])
        else:
            cj = p.rank(lv, s + j0) - p.rank(lv, s)
            _brange_rec(p, lv + 1, 2 * t + side, cj, sub, kept,
                        x1, x2, scratch, swidth, xs, ys)


def brwt_range(P, x1, y1, x2, y2):
    cdef _BwP p = _BwP(P)
    cdef int64_t cy1 = y1, cy2 = y2
    cdef Py_ssize_t swidth = cy2 - cy1 + 1
    if swidth <= 0:
        return np.zeros((0, 2), np.uint32)
    scratch_arr = np.empty((p.nlev + 1) * swidth, np.uint32)
    cdef uint32_t[::1] scratch = scratch_arr
    cdef uint32_t[::1] ids0 = scratch[:swidth]
    cdef Py_ssize_t i
    for i in range(swidth):
        ids0[i] = <uint32_t>(cy1 + i)
    cdef _U32Buf xs = _U32Buf()
    cdef _U32Buf ys = _U32Buf()
    _brange_rec(p, 0, 0, cy1, ids0, swidth, x1, x2, scratch, swidth, xs, ys)
    xa = xs.take()
    ya = ys.take()
    if xa.size == 0:
        return np.zeros((0, 2), np.uint32)
    return np.stack([xa, ya], axis=1)


cdef int _union_project(_BwP p, int lv, int64_t t, const uint8_t[::1] fx,
                        uint8_t[::1] bl, uint8_t[::1] br) except -1:
    """Scatter one node's stored halves onto the merged column set."""
    cdef Py_ssize_t w = fx.shape[0]
    cdef int64_t wx = 0, off
    cdef Py_ssize_t i, j
    if lv < p.nlev:
        wx = p.width(lv, t)
    if wx == 0:
        for i in range(w):
            bl[i] = 0
            br[i] = 0
        return 0
    cdef Py_ssize_t live = 0
    for i in range(w):
        if fx[i]:
            live += 1
    if live != wx:
        raise RuntimeError("brwt union flag drift")
    off = p.off(lv, t)
    j = 0
    for i in range(w):
        if fx[i]:
            bl[i] = <uint8_t>p.bit(lv, off + j)
            br[i] = <uint8_t>p.bit(lv, off + wx + j)
            j += 1
        else:
            bl[i] = 0
            br[i] = 0
    return 0


def brwt_union(A, B):
    """Breadth-first union: per node, project each input's halves onto the
    merged column set and OR them; survivors propagate to the children."""
    cdef _BwP a = _BwP(A)
    cdef _BwP b = _BwP(B)
    cdef int h = a.h
    cdef int64_t n = a.n
    levels = []
    cur = [(0, np.ones(n, np.uint8), np.ones(n, np.uint8))] if n else []
    cdef int lv
    cdef bint leaf
    cdef int64_t t
    cdef Py_ssize_t w, i, kl_cnt, kr_cnt
    cdef uint8_t[::1] abl, abr, bbl, bbr, obl_v, obr_v, fal, fbl, far, fbr
    for lv in range(h):
        leaf = lv == h - 1
        parts = []
        widths = np.zeros(1 << lv, np.uint32)
        nxt = []
        for t_obj, fa, fb in cur:
            t = t_obj
            w = fa.size
            widths[t] = w
            abl_a = np.empty(w, np.uint8); abr_a = np.empty(w, np.uint8)
            bbl_a = np.empty(w, np.uint8); bbr_a = np.empty(w, np.uint8)
            abl = abl_a; abr = abr_a; bbl = bbl_a; bbr = bbr_a
            _union_project(a, lv, t, fa, abl, abr)
            _union_project(b, lv, t, fb, bbl, bbr)
            obl = np.empty(w, np.uint8)
            obr = np.empty(w, np.uint8)
            obl_v = obl; obr_v = obr
            kl_cnt = 0
            kr_cnt = 0
            for i in range(w):
                obl_v[i] = abl[i] | bbl[i]
                obr_v[i] = abr[i] | bbr[i]
                if obl_v[i]:
                    kl_cnt += 1
                if obr_v[i]:
                    kr_cnt += 1
            parts.append(obl)
            parts.append(obr)
            if not leaf:
                if kl_cnt:
                    fal_a = np.empty(kl_cnt, np.uint8)
                    fbl_a = np.empty(kl_cnt, np.uint8)
                    fal = fal_a; fbl = fbl_a
                    kl_cnt = 0
                    for i in range(w):
                        if obl_v[i]:
                            fal[kl_cnt] = abl[i]
                            fbl[kl_cnt] = bbl[i]
                            kl_cnt += 1
                    nxt.append((2 * t, fal_a, fbl_a))
                if kr_cnt:
                    far_a = np.empty(kr_cnt, np.uint8)
                    fbr_a = np.empty(kr_cnt, np.uint8)
                    far = far_a; fbr = fbr_a
                    kr_cnt = 0
                    for i in range(w):
                        if obr_v[i]:
                            far[kr_cnt] = abr[i]
                            fbr[kr_cnt] = bbr[i]
                            kr_cnt += 1
                    nxt.append((2 * t + 1, far_a, fbr_a))
        bits = np.concatenate(parts) if parts else np.zeros(0, np.uint8)
        levels.append((bits, widths))
        cur = nxt
    return levels


def _setop_arena(A, B):
    cdef int h = A[12]
    nslots = 2 * ((1 << h) - 1)
    caps = np.zeros(nslots, np.int64)
    for lv in range(h):
        cnt = 1 << lv
        tot = np.zeros(cnt, np.int64)
        if lv < A[9]:
            tot += A[5][int(A[6][lv]):int(A[6][lv]) + cnt].astype(np.int64)
        if lv < B[9]:
            tot += B[5][int(B[6][lv]):int(B[6][lv]) + cnt].astype(np.int64)
        base = 2 * (cnt - 1)
        idx = base + 2 * np.arange(cnt)
        caps[idx] = tot
        caps[idx + 1] = tot
    starts = np.zeros(nslots + 1, np.int64)
    np.cumsum(caps, out=starts[1:])
    arena = np.zeros(int(starts[-1]), np.uint8)
    return arena, starts, starts[:-1].copy()


def _assemble(h, arena, starts, fill):
    cdef const uint8_t[::1] av = arena
    cdef const int64_t[::1] sv = starts
    cdef const int64_t[::1] fv = fill
    cdef int ch = h
    levels = []
    cdef int last = 0, lv
    cdef int64_t cnt, base, t, s, wl, wr, total, pos, j
    cdef uint32_t[::1] wv
    cdef uint8_t[::1] bv
    for lv in range(ch):
        cnt = (<int64_t>1) << lv
        base = 2 * (cnt - 1)
        widths = np.zeros(cnt, np.uint32)
        wv = widths
        total = 0
        for t in range(cnt):
            s = base + 2 * t
            wl = fv[s] - sv[s]
            wr = fv[s + 1] - sv[s + 1]
            if wl != wr:
                raise RuntimeError("brwt setop half-width drift")
            wv[t] = <uint32_t>wl
            total += wl
        bits = np.empty(2 * total, np.uint8)
        bv = bits
        pos = 0
        for t in range(cnt):
            s = base + 2 * t
            for j in range(sv[s], fv[s]):
                bv[pos] = av[j]; pos += 1
            for j in range(sv[s + 1], fv[s + 1]):
                bv[pos] = av[j]; pos += 1
        levels.append((bits, widths))
        if total:
            last = lv
    return levels[:last + 1]


@cython.final
cdef class _BwSetop:
    cdef _BwP a, b
    cdef int op, leaf_lv
    cdef uint8_t[::1] arena
    cdef int64_t[::1] fill
    cdef uint32_t[::1] pA, pB

    def __cinit__(self, int op, A, B, arena, fill, pA, pB):
        self.op = op
        self.a = _BwP(A)
        self.b = _BwP(B)
        self.leaf_lv = self.a.h - 1
        self.arena = arena
        self.fill = fill
        if pA is not None:
            self.pA = pA
            self.pB = pB

    # ---------------- cursor navigation

    cdef void c_skip(self, bint side_b, int64_t slot, int lv) noexcept:
        cdef _BwP x = self.b if side_b else self.a
        cdef uint32_t[::1] px = self.pB if side_b else self.pA
        cdef uint32_t p0 = px[slot]
        cdef uint32_t p1 = px[slot + 1]
        cdef int b1 = x.bit(lv, p0)
        cdef int b2 = x.bit(lv, p1)
        if lv < self.leaf_lv:
            if b1:
                self.c_skip(side_b, (slot + 1) * 2, lv + 1)
            if b2:
                self.c_skip(side_b, (slot + 2) * 2, lv + 1)
        px[slot] = p0 + 1
        px[slot + 1] = p1 + 1

    cdef void c_copy(self, bint side_b, int64_t slot, int lv) noexcept:
        cdef _BwP x = self.b if side_b else self.a
        cdef uint32_t[::1] px = self.pB if side_b else self.pA
        cdef uint32_t p0 = px[slot]
        cdef uint32_t p1 = px[slot + 1]
        cdef int b1 = x.bit(lv, p0)
        cdef int b2 = x.bit(lv, p1)
        if lv < self.leaf_lv:
            if b1:
                self.c_copy(side_b, (slot + 1) * 2, lv + 1)
            if b2:
                self.c_copy(side_b, (slot + 2) * 2, lv + 1)
        self.arena[self.fill[slot]] = <uint8_t>b1
        self.fill[slot] += 1
        self.arena[self.fill[slot + 1]] = <uint8_t>b2
        self.fill[slot + 1] += 1
        px[slot] = p0 + 1
        px[slot + 1] = p1 + 1

    cdef int c_half(self, int a, int b, int64_t cslot, int clv) noexcept:
        if a and b:
            return self.c_rec(cslot, clv)
        if a:
            if self.op == C_INTER:
                self.c_skip(0, cslot, clv)
                return 0
            self.c_copy(0, cslot, clv)
            return 1
        if b:
            if self.op == C_SYMDIFF:
                self.c_copy(1, cslot, clv)
                return 1
            self.c_skip(1, cslot, clv)
            return 0
        return 0

    cdef int c_rec(self, int64_t slot, int lv) noexcept:
        cdef uint32_t pa0 = self.pA[slot]
        cdef uint32_t pa1 = self.pA[slot + 1]
        cdef uint32_t pb0 = self.pB[slot]
        cdef uint32_t pb1 = self.pB[slot + 1]
        cdef int a1 = self.a.bit(lv, pa0)
        cdef int a2 = self.a.bit(lv, pa1)
        cdef int b1 = self.b.bit(lv, pb0)
        cdef int b2 = self.b.bit(lv, pb1)
        cdef int kl, kr
        if lv == self.leaf_lv:
            kl = _leafval_c(self.op, a1, b1)
            kr = _leafval_c(self.op, a2, b2)
        else:
            kl = self.c_half(a1, b1, (slot + 1) * 2, lv + 1)
            kr = self.c_half(a2, b2, (slot + 2) * 2, lv + 1)
        if kl or kr or slot == 0:
            self.arena[self.fill[slot]] = <uint8_t>kl
            self.fill[slot] += 1
            self.arena[self.fill[slot + 1]] = <uint8_t>kr
            self.fill[slot + 1] += 1
        self.pA[slot] = pa0 + 1
        self.pA[slot + 1] = pa1 + 1
        self.pB[slot] = pb0 + 1
        self.pB[slot + 1] = pb1 + 1
        return 1 if (kl or kr) else 0

    # ---------------- rank navigation

    cdef void r_copy(self, bint side_b, int lv, int64_t t, int64_t j) noexcept:
        cdef _BwP x = self.b if side_b else self.a
        cdef int64_t off = x.off(lv, t)
        cdef int64_t w = x.width(lv, t)
        cdef int x1 = x.bit(lv, off + j)
        cdef int x2 = x.bit(lv, off + w + j)
        if lv < self.leaf_lv:
            if x1:
                self.r_copy(side_b, lv + 1, 2 * t,
                            x.rank(lv, off + j) - x.rank(lv, off))
            if x2:
                self.r_copy(side_b, lv + 1, 2 * t + 1,
                            x.rank(lv, off + w + j) - x.rank(lv, off + w))
        cdef int64_t slot = 2 * (((<int64_t>1) << lv) - 1 + t)
        self.arena[self.fill[slot]] = <uint8_t>x1
        self.fill[slot] += 1
        self.arena[self.fill[slot + 1]] = <uint8_t>x2
        self.fill[slot + 1] += 1

    cdef int r_rec(self, int lv, int64_t t, int64_t ja, int64_t jb) noexcept:
        cdef int64_t offa = self.a.off(lv, t)
        cdef int64_t wa = self.a.width(lv, t)
        cdef int64_t offb = self.b.off(lv, t)
        cdef int64_t wb = self.b.width(lv, t)
        cdef int a1 = self.a.bit(lv, offa + ja)
        cdef int a2 = self.a.bit(lv, offa + wa + ja)
        cdef int b1 = self.b.bit(lv, offb + jb)
        cdef int b2 = self.b.bit(lv, offb + wb + jb)
        cdef int kl, kr
        if lv == self.leaf_lv:
            kl = _leafval_c(self.op, a1, b1)
            kr = _leafval_c(self.op, a2, b2)
        else:
            kl = 0
            kr = 0
            if a1 and b1:
                kl = self.r_rec(lv + 1, 2 * t,
                                self.a.rank(lv, offa + ja) - self.a.rank(lv, offa),
                                self.b.rank(lv, offb + jb) - self.b.rank(lv, offb))
            elif a1:
                if self.op != C_INTER:
                    self.r_copy(0, lv + 1, 2 * t,
                                self.a.rank(lv, offa + ja) - self.a.rank(lv, offa))
                    kl = 1
            elif b1:
                if self.op == C_SYMDIFF:
                    self.r_copy(1, lv + 1, 2 * t,
                                self.b.rank(lv, offb + jb) - self.b.rank(lv, offb))
                    kl = 1
            if a2 and b2:
                kr = self.r_rec(lv + 1, 2 * t + 1,
                                self.a.rank(lv, offa + wa + ja) - self.a.rank(lv, offa + wa),
                                self.b.rank(lv, offb + wb + jb) - self.b.rank(lv, offb + wb))
            elif a2:
                if self.op != C_INTER:
                    self.r_copy(0, lv + 1, 2 * t + 1,
                                self.a.rank(lv, offa + wa + ja) - self.a.rank(lv, offa + wa))
                    kr = 1
            elif b2:
                if self.op == C_SYMDIFF:
                    self.r_copy(1, lv + 1, 2 * t + 1,
                                self.b.rank(lv, offb + wb + jb) - self.b.rank(lv, offb + wb))
                    kr = 1
        cdef int64_t slot = 2 * (((<int64_t>1) << lv) - 1 + t)
        if kl or kr or slot == 0:
            self.arena[self.fill[slot]] = <uint8_t>kl
            self.fill[slot] += 1
            self.arena[self.fill[slot + 1]] = <uint8_t>kr
            self.fill[slot + 1] += 1
        return 1 if (kl or kr) else 0


cdef inline int _leafval_c(int op, int a, int b) noexcept:
    if op == C_INTER:
        return a & b
    if op == C_DIFF:
        return a & (1 - b)
    return a ^ b


def brwt_setop_cursor(op, A, B, pA, pB):
    """Depth-first pairwise op, cursor navigation: one root-to-leaf pass
    per root column, with per-slot cursors replacing rank calls."""
    cdef int h = A[12]
    cdef int64_t n = A[10]
    arena, starts, fill = _setop_arena(A, B)
    cdef _BwSetop s = _BwSetop(op, A, B, arena, fill, pA, pB)
    cdef int64_t col
    for col in range(n):
        s.c_rec(0, 0)
    return _assemble(h, arena, starts, fill)


def brwt_setop_rank(op, A, B):
    """Same pairwise op via rank navigation: child positions are recomputed
    with rank calls instead of cursor tables."""
    cdef int h = A[12]
    cdef int64_t n = A[10]
    arena, starts, fill = _setop_arena(A, B)
    cdef _BwSetop s = _BwSetop(op, A, B, arena, fill, None, None)
    cdef int64_t col
    for col in range(n):
        s.r_rec(0, 0, col, col)
    return _assemble(h, arena, starts, fill)


# ---------------------------------------------------------------- rice

@cython.final
cdef class _RiceWriter:
    cdef object arr
    cdef uint64_t[::1] w
    cdef int64_t nbits

    def __cinit__(self):
        self.arr = np.zeros(64, np.uint64)
        self.w = self.arr
        self.nbits = 0

    cdef void ensure(self, int64_t addbits):
        cdef int64_t need = (self.nbits + addbits + 63) >> 6
        cdef int64_t cap = self.w.shape[0]
        if need <= cap:
            return
        while cap < need:
            cap <<= 1
        fresh = np.zeros(cap, np.uint64)
        fresh[:self.w.shape[0]] = self.arr
        self.arr = fresh
        self.w = fresh

    cdef inline void write(self, uint64_t value, int width) noexcept:
        # LSB first: bit i of value lands at position nbits + i
        cdef int64_t wi = self.nbits >> 6
        cdef int bi = <int>(self.nbits & 63)
        if width < 64:
            value &= _lowmask(width)
        self.w[wi] |= value << bi
        if width > 64 - bi:
            self.w[wi + 1] |= value >> (64 - bi)
        self.nbits += width

    cdef void write_ones(self, int64_t q):
        cdef int chunk
        while q > 0:
            chunk = 63 if q > 63 else <int>q
            self.ensure(chunk)
            self.write(_lowmask(chunk), chunk)
            q -= chunk

    cdef void rice(self, int64_t v, int k):
        cdef int64_t q = v >> k
        self.write_ones(q)
        self.ensure(1 + k)
        self.write(0, 1)
        self.write(<uint64_t>v & _lowmask(k), k)

    cdef void varint(self, int64_t v):
        cdef uint64_t chunk
        while True:
            chunk = <uint64_t>v & 0x7F
            v >>= 7
            self.ensure(8)
            self.write(1 if v else 0, 1)
            self.write(chunk, 7)
            if not v:
                break

    cdef object take(self):
        cdef int64_t nwords = (self.nbits + 63) >> 6
        return np.asarray(self.w[:nwords]).copy()


@cython.final
cdef class _RiceReader:
    cdef const uint64_t[::1] words
    cdef int64_t pos, end

    def __cinit__(self, words, int64_t pos, int64_t end):
        self.words = words
        self.pos = pos
        self.end = end

    cdef uint64_t read(self, int width) except? 0xFFFFFFFFFFFFFFFF:
        if self.pos + width > self.end:
            raise ValueError("corrupt row payload: truncated code")
        cdef int64_t wi = self.pos >> 6
        cdef int bi = <int>(self.pos & 63)
        cdef uint64_t v = self.words[wi] >> bi
        if bi + width > 64:
            v |= self.words[wi + 1] << (64 - bi)
        if width < 64:
            v &= _lowmask(width)
        self.pos += width
        return v

    cdef int64_t unary(self) except -1:
        cdef int64_t q = 0
        cdef int64_t wi, avail
        cdef int bi, tz
        cdef uint64_t chunk
        while True:
            if self.pos >= self.end:
                raise ValueError("corrupt row payload: unterminated unary part")
            wi = self.pos >> 6
            bi = <int>(self.pos & 63)
            avail = 64 - bi
            if avail > self.end - self.pos:
                avail = self.end - self.pos
            chunk = (~(self.words[wi] >> bi)) & _lowmask(<int>avail)
            if chunk:
                tz = __builtin_ctzll(chunk)
                q += tz
                self.pos += tz + 1
                return q
            q += avail
            self.pos += avail

    cdef int64_t rice(self, int k) except -1:
        cdef int64_t q = self.unary()
        return (q << k) | <int64_t>self.read(k)

    cdef int64_t varint(self) except -1:
        cdef int64_t result = 0
        cdef int shift = 0
        cdef uint64_t cont
        while True:
            cont = self.read(1)
            result |= (<int64_t>self.read(7)) << shift
            shift += 7
            if not cont:
                return result
            if shift > 63:
                raise ValueError("corrupt row payload: runaway varint")


def rice_encode(cols, indptr, n):
    cdef const uint32_t[::1] cv = np.ascontiguousarray(cols, np.uint32)
    cdef const int64_t[::1] iv = np.ascontiguousarray(indptr, np.int64)
    cdef int64_t cn = n
    offsets = np.zeros(cn + 1, np.uint64)
    cdef uint64_t[::1] ov = offsets
    cdef _RiceWriter wr = _RiceWriter()
    sym_arr = np.empty(2 * max(cn, 1) + 2, np.int64)
    cdef int64_t[::1] sym = sym_arr
    cdef int64_t x, lo, hi, p, p0, g, scnt, i, s
    cdef int64_t cost[17]
    cdef int64_t best_cost
    cdef int k, best_k
    for x in range(cn):
        lo = iv[x]
        hi = iv[x + 1]
        if hi > lo:
            # gap transform: absolute head, then gap-1 symbols with every
            # maximal run of consecutive ids collapsed to 0 + run length
            scnt = 0
            sym[scnt] = cv[lo]; scnt += 1
            p = lo + 1
            while p < hi:
                g = <int64_t>cv[p] - <int64_t>cv[p - 1]
                if g == 1:
                    p0 = p
                    while p < hi and <int64_t>cv[p] - <int64_t>cv[p - 1] == 1:
                        p += 1
                    sym[scnt] = 0; scnt += 1
                    sym[scnt] = p - p0; scnt += 1
                else:
                    sym[scnt] = g - 1; scnt += 1
                    p += 1
            for k in range(17):
                cost[k] = (k + 1) * scnt
            for i in range(scnt):
                s = sym[i]
                for k in range(17):
                    cost[k] += s >> k
            best_k = 0
            best_cost = -1
            for k in range(17):
                if best_cost < 0 or cost[k] < best_cost:
                    best_cost = cost[k]
                    best_k = k
            wr.ensure(5)
            wr.write(best_k, 5)
            wr.varint(hi - lo)
            for i in range(scnt):
                wr.rice(sym[i], best_k)
        ov[x + 1] = <uint64_t>wr.nbits
    return offsets, wr.take()


cdef object _decode_row(const uint64_t[::1] words, int64_t lo, int64_t hi,
                        int64_t cap):
    if hi <= lo:
        return np.zeros(0, np.uint32)
    cdef _RiceReader rd = _RiceReader(words, lo, hi)
    cdef int k = <int>rd.read(5)
    cdef int64_t d = rd.varint()
    if d < 1 or d > cap:
        raise ValueError("corrupt row payload: bad degree")
    out_arr = np.empty(d, np.uint32)
    cdef uint32_t[::1] out = out_arr
    cdef int64_t prev = rd.rice(k)
    out[0] = <uint32_t>prev
    cdef int64_t cnt = 1
    cdef int64_t v, r, i
    while cnt < d:
        v = rd.rice(k)
        if v == 0:
            r = rd.rice(k)
            if r < 1 or cnt + r > d:
                raise ValueError("corrupt row payload: bad run length")
            for i in range(r):
                prev += 1
                out[cnt] = <uint32_t>prev
                cnt += 1
        else:
            prev += v + 1
            out[cnt] = <uint32_t>prev
            cnt += 1
    if rd.pos != hi:
        raise ValueError("corrupt row payload: trailing bits")
    return out_arr


def rice_decode_row(words, lo, hi, cap):
    return _decode_row(words, lo, hi, cap)


def rice_successors(R, x):
    words, offs, n = R
    return _decode_row(words, int(offs[x]), int(offs[x + 1]), n)


cdef inline Py_ssize_t _bsearch(const uint32_t[::1] row, Py_ssize_t size,
                                uint32_t y) noexcept:
    cdef Py_ssize_t lo = 0, hi = size, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if row[mid] < y:
            lo = mid + 1
        else:
            hi = mid
    return lo


def rice_is_related(R, x, y):
    row = rice_successors(R, x)
    cdef const uint32_t[::1] rv = row
    cdef Py_ssize_t i = _bsearch(rv, rv.shape[0], <uint32_t>y)
    return bool(i < rv.shape[0] and rv[i] == <uint32_t>y)


def rice_predecessors(R, y):
    # deliberately a full scan: every row is decoded and probed
    words, offs, n = R
    cdef const uint64_t[::1] wv = words
    cdef const uint64_t[::1] offv = offs
    cdef int64_t cn = n
    cdef uint32_t cy = y
    cdef _U32Buf out = _U32Buf()
    cdef int64_t x
    cdef Py_ssize_t i
    cdef const uint32_t[::1] rv
    for x in range(cn):
        row = _decode_row(wv, <int64_t>offv[x], <int64_t>offv[x + 1], cn)
        rv = row
        if rv.shape[0]:
            i = _bsearch(rv, rv.shape[0], cy)
            if i < rv.shape[0] and rv[i] == cy:
                out.push(<uint32_t>x)
    return out.take()


def rice_range(R, x1, y1, x2, y2):
    words, offs, n = R
    cdef const uint64_t[::1] wv = words
    cdef const uint64_t[::1] offv = offs
    cdef int64_t cn = n
    cdef int64_t cx1 = x1, cx2 = x2
    cdef uint32_t cy1 = y1, cy2 = y2
    cdef _U32Buf xs = _U32Buf()
    cdef _U32Buf ys = _U32Buf()
    cdef int64_t x
    cdef Py_ssize_t lo, hi_i
    cdef const uint32_t[::1] rv
    for x in range(cx1, cx2 + 1):
        row = _decode_row(wv, <int64_t>offv[x], <int64_t>offv[x + 1], cn)
        rv = row
        if rv.shape[0]:
            lo = _bsearch(rv, rv.shape[0], cy1)
            hi_i = _bsearch(rv, rv.shape[0], cy2 + 1)
            while lo < hi_i:
                xs.push(<uint32_t>x)
                ys.push(rv[lo])
                lo += 1
    xa = xs.take()
    ya = ys.take()
    if xa.size == 0:
        return np.zeros((0, 2), np.uint32)
    return np.stack([xa, ya], axis=1)


cdef Py_ssize_t _merge_rows(int op, const uint32_t[::1] ra, const uint32_t[::1] rb,
                            uint32_t[::1] out) noexcept:
    """Two-pointer set operation over two sorted unique rows."""
    cdef Py_ssize_t ia = 0, ib = 0, cnt = 0
    cdef Py_ssize_t na = ra.shape[0], nb = rb.shape[0]
    cdef uint32_t va, vb
    while ia < na and ib < nb:
        va = ra[ia]
        vb = rb[ib]
        if va < vb:
            if op != C_INTER:
                out[cnt] = va; cnt += 1
            ia += 1
        elif vb < va:
            if op == C_UNION or op == C_SYMDIFF:
                out[cnt] = vb; cnt += 1
            ib += 1
        else:
            if op == C_UNION or op == C_INTER:
                out[cnt] = va; cnt += 1
            ia += 1
            ib += 1
    if op != C_INTER:
        while ia < na:
            out[cnt] = ra[ia]; cnt += 1
            ia += 1
    if op == C_UNION or op == C_SYMDIFF:
        while ib < nb:
            out[cnt] = rb[ib]; cnt += 1
            ib += 1
    return cnt


def rice_setop(op, Ra, Rb):
    wordsa, offsa, n = Ra
    wordsb, offsb, _ = Rb
    cdef const uint64_t[::1] wa = wordsa
    cdef const uint64_t[::1] wb = wordsb
    cdef const uint64_t[::1] ofa = offsa
    cdef const uint64_t[::1] ofb = offsb
    cdef int64_t cn = n
    cdef int cop = op
    indptr = np.zeros(cn + 1, np.int64)
    cdef int64_t[::1] iv = indptr
    cdef _U32Buf cols = _U32Buf()
    scratch_arr = np.empty(2 * max(cn, 1), np.uint32)
    cdef uint32_t[::1] scratch = scratch_arr
    cdef const uint32_t[::1] rav, rbv
    cdef int64_t x
    cdef Py_ssize_t cnt, i
    for x in range(cn):
        ra = _decode_row(wa, <int64_t>ofa[x], <int64_t>ofa[x + 1], cn)
        rb = _decode_row(wb, <int64_t>ofb[x], <int64_t>ofb[x + 1], cn)
        rav = ra
        rbv = rb
        cnt = _merge_rows(cop, rav, rbv, scratch)
        iv[x + 1] = iv[x] + cnt
        for i in range(cnt):
            cols.push(scratch[i])
    return rice_encode(cols.take(), indptr, cn)
