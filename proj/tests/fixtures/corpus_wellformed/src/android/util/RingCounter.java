package android.util;

public class RingCounter {
    private int mValue = 0;
    private int mModulus = 16;

    public void advance() {
        mValue = (mValue + 1) % mModulus;
    }

    public int current() {
        return mValue;
    }

    public void setModulus(int modulus) {
        mModulus = modulus;
    }

    public int getModulus() {
        return mModulus;
    }
}
