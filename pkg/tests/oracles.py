"""Independent reference implementations used to cross-check the engine.

Everything here is pure-Python (math module, no numpy vector paths) and
re-derives rates from first principles, so it shares no code with the
package internals it verifies. Arithmetic follows the documented order
(unit rate at load 1, divided by the post-join load) so exact float
comparison against the engine is meaningful.
"""
import itertools
import math

NONE = -1


def unit_rates(snr_rows, bandwidth_hz, threshold_db):
    """unit_rates[i][j]: rate of vehicle i alone on station j (0 in outage)."""
    out = []
    for row in snr_rows:
        rates = []
        for snr, bw in zip(row, bandwidth_hz):
            if snr < threshold_db:
                rates.append(0.0)
            else:
                rates.append(bw * math.log2(1.0 + 10.0 ** (snr / 10.0)))
        out.append(rates)
    return out


def ms_best(snr_row, threshold_db):
    best = max(range(len(snr_row)), key=lambda j: (snr_row[j], -j))
    # max() keeps the first of equals only with the -j key trick above
    return best if snr_row[best] >= threshold_db else NONE


def mr_best(unit_row, loads):
    best, best_rate = NONE, 0.0
    for j, unit in enumerate(unit_row):
        rate = unit / (loads[j] + 1)
        if rate > best_rate:
            best, best_rate = j, rate
    return best


def ra_best(unit_row, loads, is_lte, required):
    best_lte, best_rate = NONE, 0.0
    for j, unit in enumerate(unit_row):
        if not is_lte[j]:
            continue
        rate = unit / (loads[j] + 1)
        if rate > best_rate:
            best_lte, best_rate = j, rate
    if best_lte != NONE and best_rate > required:
        return best_lte
    return mr_best(unit_row, loads)


def best_response(policy_name, instance, vn, loads):
    snr, units, bw, is_lte, req, threshold = instance
    if policy_name == "MS":
        return ms_best(snr[vn], threshold)
    if policy_name == "MR":
        return mr_best(units[vn], loads)
    return ra_best(units[vn], loads, is_lte, req[vn])


def make_instance(snr_rows, bandwidth_hz, is_lte, required, threshold_db):
    return (snr_rows, unit_rates(snr_rows, bandwidth_hz, threshold_db),
            bandwidth_hz, is_lte, required, threshold_db)


def is_fixed_point(policy_name, instance, assignment):
    """True iff no vehicle would switch when re-evaluated in isolation."""
    n_bs = len(instance[2])
    loads = [0] * n_bs
    for bs in assignment:
        if bs != NONE:
            loads[bs] += 1
    for vn, current in enumerate(assignment):
        if current != NONE:
            loads[current] -= 1
        best = best_response(policy_name, instance, vn, loads)
        if current != NONE:
            loads[current] += 1
        if best != current:
            return False
    return True


def find_fixed_point(policy_name, instance):
    """Exhaustively enumerate assignments; return the first fixed point or
    None when none exists. Only feasible for micro instances."""
    n_vn = len(instance[0])
    n_bs = len(instance[2])
    for assignment in itertools.product(range(-1, n_bs), repeat=n_vn):
        if is_fixed_point(policy_name, instance, list(assignment)):
            return list(assignment)
    return None
