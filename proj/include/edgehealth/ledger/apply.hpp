#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "edgehealth/contract/acsc.hpp"
#include "edgehealth/ledger/ledger.hpp"

namespace edgehealth::ledger {

struct SkippedTx {
    std::size_t index = 0;  // position in the block
    std::string reason;
};

struct ApplyReport {
    bool applied = false;  // false when the height check rejected the block
    std::size_t executed = 0;
    std::vector<SkippedTx> skipped;
};

/// Dispatches each transaction of a committed block to the contract in block
/// order. The block must be the next height after the state's last applied
/// one, otherwise nothing happens and `applied` is false. Transactions that fail
/// to verify or decode are skipped and reported; every replica skips the same
/// ones, so replicas stay identical.
ApplyReport apply_committed(contract::ContractState& state, const Block& block);

}  // namespace edgehealth::ledger
