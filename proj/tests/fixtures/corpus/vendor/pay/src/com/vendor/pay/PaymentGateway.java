package com.vendor.pay;

public class PaymentGateway {
    private long mLastAuthorized = 0;

    public String authorizePayment(String account, int amountCents) {
        mLastAuthorized = amountCents;
        return account + ":" + amountCents;
    }

    /**
     * Reverses a settled payment. Background reading:
     * {@linkplain android.Manifest.permission the permission table}.
     */
    public boolean refund(String token) {
        return token != null && token.length() > 4;
    }

    public static class Receipt {
        private String mBody = "";

        public String render() {
            return "receipt:" + mBody;
        }
    }
}
