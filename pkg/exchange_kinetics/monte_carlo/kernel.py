"""
JIT-compiled event loop of the exchange model.

Bank bookkeeping follows the single rule B_c = B_* - sum_i max(-S_i, 0), updated
incrementally: giving from S_i <= 0 takes one dollar of cash, receiving into S_j < 0
returns one.
"""

from numba import njit


@njit(nogil=True, cache=True)
def exchange(wealth, bank_cash, giver, receiver):
    """Apply one giver -> receiver transfer and return the new bank cash."""
    if wealth[giver] <= 0:
        if bank_cash == 0:
            return bank_cash
        bank_cash -= 1
    if wealth[receiver] < 0:
        bank_cash += 1
    wealth[giver] -= 1
    wealth[receiver] += 1
    return bank_cash


@njit(nogil=True, cache=True)
def exchange_batch(wealth, bank_cash, givers, receivers, first_event, depletion_event):
    """
    Apply a batch of transfers in order.
    Returns (bank_cash, depletion_event) where depletion_event is the first event
    count at which the bank cash reached zero, or -1 if it has not.
    """
    for k in range(givers.shape[0]):
        bank_cash = exchange(wealth, bank_cash, givers[k], receivers[k])
        if bank_cash == 0 and depletion_event < 0:
            depletion_event = first_event + k + 1
    return bank_cash, depletion_event


@njit(nogil=True, cache=True)
def total_debt(wealth):
    total = 0
    for s in wealth:
        if s < 0:
            total -= s
    return total
