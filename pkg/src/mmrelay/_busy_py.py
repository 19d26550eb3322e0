"""Pure-Python busy-period kernel, the reference for the compiled ``_busy``."""


def busy_periods(gaps, sojourns, n_slots, x_out, y_out, load_out, first_out, offset):
    """Cut an obstacle stream into (non-LoS, LoS) slot pairs.

    Obstacle ``k`` arrives ``gaps[k]`` after obstacle ``k - 1`` and stays
    ``sojourns[k]``.  Obstacle 0 opens the first slot, so ``gaps[0]`` (the
    initial LoS lead-in) is never read.  Each slot is measured relative to
    its own start to keep absolute time out of the arithmetic.

    Writes completed slots at ``offset`` onward and returns
    ``(slots_done, k)``; ``k`` indexes the obstacle that opens the first
    slot not completed because the stream ran out.
    """
    gaps = gaps.tolist() if hasattr(gaps, "tolist") else gaps
    sojourns = sojourns.tolist() if hasattr(sojourns, "tolist") else sojourns
    n = len(gaps)
    k = 0
    done = 0
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
