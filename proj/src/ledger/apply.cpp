#include "edgehealth/ledger/apply.hpp"

namespace edgehealth::ledger {

namespace {

using namespace edgehealth::contract;

void dispatch(ContractState& state, const LedgerTx& tx) {
    switch (tx.kind) {
        case TxKind::Storage: {
            StorageTx s = StorageTx::decode(tx.payload);
            state.register_record(s.hash, s.patient, s.owner, s.timestamp);
            return;
        }
        case TxKind::Registration: {
            RegistrationRecord rec = RegistrationRecord::decode(tx.payload);
            SignedMessage msg = SignedMessage::decode(rec.signed_registration);
            RegistrationTx reg = RegistrationTx::decode(msg.payload);
            if (!crypto::verify(msg.signature, msg.payload, reg.user_pk)) {
                throw MalformedTx("registration not signed by the registered key");
            }
            if (!crypto::verify(rec.receipt, msg.payload, tx.submitter)) {
                throw MalformedTx("registration receipt not signed by the submitting MEC");
            }
            state.bind_user(reg);
            return;
        }
        case TxKind::Access:
            state.record_access(AccessResult::decode(tx.payload));
            return;
        case TxKind::InterMecRequest:
            state.record_inter_mec(InterMecRequestTx::decode(tx.payload));
            return;
        case TxKind::Sharing:
            state.record_sharing(SharingTx::decode(tx.payload));
            return;
        case TxKind::Request:
        case TxKind::DataRelay:
            throw MalformedTx(to_string(tx.kind) + " belongs on a local ledger");
    }
    throw MalformedTx("unknown transaction kind");
}

}  // namespace

ApplyReport apply_committed(ContractState& state, const Block& block) {
    ApplyReport report;
    if (block.height != state.applied_height() + 1) return report;

    for (std::size_t i = 0; i < block.txs.size(); ++i) {
        const LedgerTx& tx = block.txs[i];
        if (!tx.signature_valid()) {
            report.skipped.push_back({i, "invalid submitter signature"});
            continue;
        }
        try {
            dispatch(state, tx);
            ++report.executed;
        } catch (const MalformedTx& e) {
            report.skipped.push_back({i, e.what()});
        } catch (const DuplicateRegistration& e) {
            report.skipped.push_back({i, e.what()});
        }
    }
    state.set_applied_height(block.height);
    report.applied = true;
    return report;
}

}  // namespace edgehealth::ledger
