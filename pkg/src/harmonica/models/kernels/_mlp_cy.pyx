# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementation of the feed-forward regressor kernels.

Same recipe as the numpy fallback; plain C loops instead of BLAS calls,
which wins on the small per-step shapes this runtime uses.
"""

import numpy as np

from libc.math cimport tanh

BACKEND_NAME = "compiled"


def gd_train(X, y, w1, b1, w2, b2, double lr, int epochs):
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    w1o = np.array(w1, dtype=np.float64, order="C", copy=True)
    b1o = np.array(b1, dtype=np.float64, copy=True)
    w2o = np.array(w2, dtype=np.float64, copy=True)
    cdef double[:, ::1] w1v = w1o
    cdef double[::1] b1v = b1o
    cdef double[::1] w2v = w2o
    cdef double b2v = b2

    cdef int n = Xv.shape[0]
    cdef int d = Xv.shape[1]
    cdef int H = w1v.shape[1]
    cdef int k, i, j, m

    losses = np.empty(epochs, dtype=np.float64)
    cdef double[::1] lossv = losses

    hbuf = np.empty((n, H), dtype=np.float64)
    gbuf = np.empty(n, dtype=np.float64)
    gw1 = np.empty((d, H), dtype=np.float64)
    gb1 = np.empty(H, dtype=np.float64)
    gw2 = np.empty(H, dtype=np.float64)
    cdef double[:, ::1] hv = hbuf
    cdef double[::1] gv = gbuf
    cdef double[:, ::1] gw1v = gw1
    cdef double[::1] gb1v = gb1
    cdef double[::1] gw2v = gw2

    cdef double z, pred, err, sse, gb2, dz, scale

    for k in range(epochs):
        sse = 0.0
        for i in range(n):
            pred = b2v
            for j in range(H):
                z = b1v[j]
                for m in range(d):
                    z += Xv[i, m] * w1v[m, j]
                z = tanh(z)
                hv[i, j] = z
                pred += z * w2v[j]
            err = pred - yv[i]
            sse += err * err
            gv[i] = err
        lossv[k] = sse / n

        scale = 2.0 / n
        for j in range(H):
            gw2v[j] = 0.0
            gb1v[j] = 0.0
            for m in range(d):
                gw1v[m, j] = 0.0
        gb2 = 0.0
        for i in range(n):
            gb2 += scale * gv[i]
            for j in range(H):
                z = hv[i, j]
                gw2v[j] += z * scale * gv[i]
                dz = scale * gv[i] * w2v[j] * (1.0 - z * z)
                gb1v[j] += dz
                for m in range(d):
                    gw1v[m, j] += Xv[i, m] * dz

        for j in range(H):
            w2v[j] -= lr * gw2v[j]
            b1v[j] -= lr * gb1v[j]
            for m in range(d):
                w1v[m, j] -= lr * gw1v[m, j]
        b2v -= lr * gb2

    return w1o, b1o, w2o, b2v, losses


def forward_batch(X, w1, b1, w2, b2):
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[:, ::1] w1v = np.ascontiguousarray(w1, dtype=np.float64)
    cdef double[::1] b1v = np.ascontiguousarray(b1, dtype=np.float64)
    cdef double[::1] w2v = np.ascontiguousarray(w2, dtype=np.float64)
    cdef double b2v = b2
    cdef int n = Xv.shape[0]
    cdef int d = Xv.shape[1]
    cdef int H = w1v.shape[1]
    cdef int i, j, m
    cdef double z, pred

    out = np.empty(n, dtype=np.float64)
    cdef double[::1] outv = out
    for i in range(n):
        pred = b2v
        for j in range(H):
            z = b1v[j]
            for m in range(d):
                z += Xv[i, m] * w1v[m, j]
            pred += tanh(z) * w2v[j]
        outv[i] = pred
    return out


def forward_one(x, w1, b1, w2, b2):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] w1v = np.ascontiguousarray(w1, dtype=np.float64)
    cdef double[::1] b1v = np.ascontiguousarray(b1, dtype=np.float64)
    cdef double[::1] w2v = np.ascontiguousarray(w2, dtype=np.float64)
    cdef double b2v = b2
    cdef int d = xv.shape[0]
    cdef int H = w1v.shape[1]
    cdef int j, m
    cdef double z, pred

    pred = b2v
    for j in range(H):
        z = b1v[j]
        for m in range(d):
            z += xv[m] * w1v[m, j]
        pred += tanh(z) * w2v[j]
    return pred
