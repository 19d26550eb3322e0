# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled busy-period kernel; must stay operation-for-operation identical to _busy_py."""
cimport cython


def busy_periods(const double[::1] gaps, const double[::1] sojourns, Py_ssize_t n_slots,
                 double[::1] x_out, double[::1] y_out, double[::1] load_out,
                 double[::1] first_out, Py_ssize_t offset):
    cdef Py_ssize_t n = gaps.shape[0]
    cdef Py_ssize_t k = 0, j, done = 0
    cdef double end, rel, busy, d
    while done < n_slots:
        j = k + 1
        if j >= n:
            break
        end = sojourns[k]
        busy = end
        rel = gaps[j]
        while rel < end:
            busy += sojourns[j]
            d = rel + sojourns[j]
            if d > end:
                end = d
            j += 1
            if j >= n:
                break
            rel += gaps[j]
        if j >= n:
            break
        x_out[offset + done] = end
        y_out[offset + done] = rel - end
        load_out[offset + done] = busy
        first_out[offset + done] = sojourns[k]
        done += 1
        k = j
    return done, k
